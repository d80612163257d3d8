import numpy as np
import pytest

from nexpansive import dynamics as D
from nexpansive.manifolds import (CurveGraph, diameter, iterate_curve, local_stable_curve,
                                  local_unstable_curve, polyline_length, split_graph_pieces)

GOLDEN = (1 + np.sqrt(5)) / 2


@pytest.fixture(scope="module")
def cat_info():
    f = D.linear_toral_map()
    return f, D.multipliers(f, [0.0, 0.0])


def test_cat_map_local_curves_are_eigenlines(cat_info):
    f, info = cat_info
    ws = local_stable_curve(f, info, 0.1)
    wu = local_unstable_curve(f, info, 0.1)
    assert ws.curve.derivatives(0.0, 1)[1] == pytest.approx(-GOLDEN, abs=1e-6)
    assert wu.curve.derivatives(0.0, 1)[1] == pytest.approx(1 / GOLDEN, abs=1e-6)
    assert ws.membership == 1.0 and wu.membership == 1.0
    assert abs(ws.curve.derivatives(0.0, 2)[2]) < 1e-6


def test_stable_curve_is_invariant(cat_info):
    f, info = cat_info
    ws = local_stable_curve(f, info, 0.1)
    pts = ws.curve.points(np.linspace(ws.curve.x_lo, ws.curve.x_hi, 50))
    img = f(pts)
    # images stay on the line through the origin with the same slope
    d = f.displacement(img, np.zeros(2))
    assert np.max(np.abs(d[:, 1] + GOLDEN * d[:, 0])) < 1e-9


def test_local_curve_needs_a_saddle():
    f = D.da_map()
    info = D.multipliers(f, [0.0, 0.0])
    with pytest.raises(ValueError):
        local_stable_curve(f, info, 0.1)


def test_curve_graph_polynomial_jets():
    g = CurveGraph.from_polynomial([0, 0, 1], -1, 1)
    assert g.exact
    assert g.derivatives(0.5, 2) == pytest.approx([0.25, 1.0, 2.0])
    assert g.consistency_error() < 1e-3


def test_curve_graph_rejects_non_increasing():
    with pytest.raises(ValueError):
        CurveGraph("plane", np.array([0.0, 0.0, 1.0]), np.zeros(3), np.zeros((3, 2)))


def test_restrict_keeps_formula():
    g = CurveGraph.from_polynomial([1, 1], -1, 1).restrict(0.0, 0.5)
    assert g.x_lo == 0.0 and g.x_hi == 0.5 and g.poly is not None
    with pytest.raises(ValueError):
        g.restrict(-2, 0)


def test_split_graph_pieces_on_a_circle():
    t = np.linspace(0, 2 * np.pi, 400)
    pts = np.stack([np.cos(t), np.sin(t)], -1)
    pieces = split_graph_pieces(pts, 2, "plane")
    assert len(pieces) >= 2


def test_iterate_curve_linear_map():
    f = D.linear_toral_map()
    g = CurveGraph.from_polynomial([0.1, 0.0], 0.0, 0.01, chart="Torus1")
    img = iterate_curve(f, g, 1)
    assert isinstance(img, CurveGraph)
    assert img.x_hi - img.x_lo == pytest.approx(0.02, rel=1e-6)


def test_diameter_and_length():
    pts = np.array([[0, 0], [3, 4], [1, 1]] + [[0.5, 0.5]] * 70, dtype=float)
    assert diameter(pts) == pytest.approx(5.0)
    assert polyline_length(np.array([[0, 0], [3, 4]])) == pytest.approx(5.0)


def test_curve_csv(tmp_path):
    g = CurveGraph.from_polynomial([0, 1], -1, 1, n=5)
    g.to_csv(tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0].startswith("piece,x,y,jet_1")
    assert len(lines) == 6
