import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nexpansive import dynamics as D

unit = st.floats(0.0, 1.0, exclude_max=True)


def test_cat_map_multipliers(cat):
    info = D.multipliers(cat, [0.0, 0.0])
    mods = sorted(abs(m) for m in info.multipliers)
    assert mods[0] == pytest.approx((3 - np.sqrt(5)) / 2)
    assert mods[1] == pytest.approx((3 + np.sqrt(5)) / 2)
    assert info.kind == "saddle"


def test_non_hyperbolic_matrix_rejected():
    assert not D.is_hyperbolic_matrix([[1, 1], [0, 1]])
    with pytest.raises(ValueError):
        D.linear_toral_map([[2, 0], [0, 1]])


@given(unit, unit)
def test_cat_map_inverse(x, y):
    cat = D.linear_toral_map()
    p = np.array([[x, y]])
    assert float(cat.distance(cat.inverse(cat(p)), p)[0]) < 1e-12


def test_da_fixed_point_becomes_source():
    f = D.da_map()
    info = D.multipliers(f, [0.0, 0.0])
    assert info.kind == "source"
    assert f.params["min_det"] > 0


@settings(max_examples=40, deadline=None)
@given(unit, unit)
def test_da_inverse(x, y):
    f = D.da_map()
    p = np.array([[x, y]])
    assert float(f.distance(f.inverse(f(p)), p)[0]) < 1e-9


def test_da_rejects_large_radius():
    with pytest.raises(ValueError):
        D.da_map(radius=0.3)


def test_da_jacobian_matches_finite_differences():
    f = D.da_map()
    p = np.array([0.03, -0.02])
    assert np.allclose(f.jacobian(p), D.fd_jacobian(f, p), atol=1e-6)


def test_genus2_seam_map_is_times_four(genus2, rng):
    S = genus2.surface
    r = np.sqrt(rng.uniform(0.25, 4.0, 200))
    th = rng.uniform(0, 2 * np.pi, 200)
    x = np.stack([r * np.cos(th), r * np.sin(th)], -1)
    st_ = S.normalize(S.states_from_disk(2, x / np.sum(x * x, -1, keepdims=True)))
    assert np.max(np.abs(S.disk_coords(genus2(st_)) - 4 * x)) < 1e-9


def test_genus2_inverse(genus2, rng):
    S = genus2.surface
    st_ = S.normalize(S.states_from_disk(1, rng.uniform(-1.4, 1.4, (100, 2))))
    st_ = st_[np.linalg.norm(S.disk_coords(st_), axis=1) >= 0.5]
    assert np.max(S.distance(genus2.inverse(genus2(st_)), st_)) < 1e-9


def test_genus2_unknown_variant():
    with pytest.raises(ValueError):
        D.genus2_map("quintic")


def test_scaling_perturbation_derivative(cat):
    for mu in (0.9, 0.99, 1.01):
        bump = D.scaling_bump(np.zeros(2), mu, 0.1, "torus")
        assert np.allclose(D.fd_jacobian(bump, np.zeros(2)), mu * np.eye(2), atol=1e-6)


def test_scaling_perturbation_scales_multipliers(cat):
    base = D.multipliers(cat, [0, 0])
    g = D.local_scaling_perturbation(cat, [0.0, 0.0], 0.95, 0.1)
    m = D.multipliers(g, [0, 0])
    assert np.allclose(m.multipliers, 0.95 * np.array(base.multipliers), atol=1e-9)


def test_scaling_perturbation_identical_outside(cat, rng):
    g = D.local_scaling_perturbation(cat, [0.0, 0.0], 1.01, 0.1)
    pts = rng.random((500, 2))
    pts = pts[cat.distance(pts, np.zeros((1, 2))) > 0.1]
    assert np.array_equal(g(pts), cat(pts))


def test_scaling_perturbation_rejects_large_mu(cat):
    with pytest.raises(ValueError):
        D.local_scaling_perturbation(cat, [0.0, 0.0], 5.0, 0.1)


def test_tangency_model_inverse():
    f = D.tangency_model_map(3)
    p = np.asarray(f.params["p"]) + np.random.default_rng(1).uniform(-0.5, 0.5, (100, 2))
    assert np.max(np.abs(f.inverse(f(p)) - p)) < 1e-9


def test_cr_distance_of_identical_maps_is_zero(cat):
    assert D.cr_norm_distance(cat, cat, 2, ([0.5, 0.5], 0.2, 5)) == 0.0


def test_cr_distance_scaling_shrinks_towards_identity(cat):
    d = [D.cr_norm_distance(cat, D.local_scaling_perturbation(cat, [0, 0], mu, 0.1), 2,
                            ([0.0, 0.0], 0.12, 25)) for mu in (1.1, 1.01, 1.001)]
    assert d[0] > d[1] > d[2]


def test_sample_grid_forms():
    a = D.sample_grid(([0, 0], 1.0, 3))
    b = D.sample_grid({"center": [0, 0], "half_width": 1.0, "n": 3})
    assert a.shape == (9, 2) and np.array_equal(a, b)


def test_classify():
    assert D.classify([2.0, 0.5]) == ("saddle", True)
    assert D.classify([0.5, 0.2]) == ("sink", True)
    assert D.classify([1.0, 3.0])[1] is False
