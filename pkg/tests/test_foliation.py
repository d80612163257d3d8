import numpy as np
import pytest

from nexpansive.foliation import (a_grid, census, circle_curvature_gap, family, family_coeffs,
                                  inversion_model, line_circle_intersections, merge_censuses)


def test_family_coefficients():
    assert family_coeffs(3, 1.0) == pytest.approx([9.0, 0.0, 0.0, 1.0])
    assert family_coeffs(4, 0.5) == pytest.approx([8.0, 0.0, -0.75, 0.0, 1.0])


def test_a_grid_hits_integers():
    g = a_grid(0.01)
    assert 1.0 in g and -1.0 in g and 0.01 in g
    assert len(g) == 401


def test_cubic_census():
    C = census(family("cubic"))
    assert C.max_count == 3
    assert C.max_contact_order == 2
    assert C.derivative_floor == 6.0
    assert C.param_slope_min >= 1.0
    top = {(a, x) for a, x, c, k in C.tangencies if k == 2}
    assert top == {(-1.0, 0.0), (1.0, 0.0)}


def test_quartic_census():
    C = census(family("quartic"), a_values=a_grid(0.01, -0.1, 0.1))
    assert C.max_count == 4
    assert C.derivative_floor == 24.0


def test_merge_matches_single_census():
    fam = family("cubic")
    whole = census(fam, a_values=a_grid(0.1))
    parts = [census(fam, a_values=chunk) for chunk in np.array_split(a_grid(0.1), 3)]
    merged = merge_censuses(parts)
    assert merged.rows == whole.rows
    assert merged.max_count == whole.max_count
    assert merged.attaining == whole.attaining


def test_inversion_circles_quadratic_tangencies():
    C = census(family("inversion-circles"))
    assert C.max_count == 2
    assert {t[3] for t in C.tangencies} == {1}


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_curvature_gap(c):
    assert circle_curvature_gap(c) == pytest.approx(2 * abs(c), abs=1e-6)


def test_inversion_model_lies_on_circle():
    for c in (0.3, 1.0, -1.5):
        for piece in inversion_model(c):
            pts = piece.points(np.linspace(piece.x_lo, piece.x_hi, 20))
            assert np.allclose(np.sum(pts ** 2, -1) - pts[:, 1] / c, 0, atol=1e-9)


def test_line_circle_intersections():
    pts = line_circle_intersections(1.0, 1.0)
    assert len(pts) == 1
    assert len(line_circle_intersections(0.9, 1.0)) == 2
    assert len(line_circle_intersections(1.1, 1.0)) == 0


def test_general_family_is_experimental():
    fam = family("general", 5)
    assert fam.experimental
    with pytest.raises(ValueError):
        family("general")
