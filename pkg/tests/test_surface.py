import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nexpansive.surface import (ChartPoint, GluedSurface, canonical_rep, distance, inversion,
                                torus_distance)

annulus = st.tuples(st.floats(0.5, 2.0), st.floats(0, 2 * np.pi)).map(
    lambda rt: (rt[0] * np.cos(rt[1]), rt[0] * np.sin(rt[1])))


def test_inversion_examples():
    assert np.allclose(inversion([2.0, 0.0]), [0.5, 0.0])
    assert np.allclose(inversion([0.0, 1.0]), [0.0, 1.0])


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_inversion_maps_circles_to_reciprocal_circles(r):
    th = np.linspace(0, 2 * np.pi, 64)
    x = r * np.stack([np.cos(th), np.sin(th)], -1)
    assert np.allclose(np.linalg.norm(inversion(x), axis=-1), 1 / r, atol=1e-12)


def test_inversion_outside_annulus_raises():
    with pytest.raises(ValueError):
        inversion([0.1, 0.0])
    with pytest.raises(ValueError):
        inversion([2.5, 0.0])


@given(annulus)
def test_inversion_is_an_involution(x):
    x = np.array(x)
    assert np.max(np.abs(inversion(inversion(x)) - x)) <= 1e-12


def test_canonical_rep_moves_outer_points():
    q = canonical_rep(ChartPoint("Disk1", (1.5, 0.0)))
    assert q.chart == "Disk2"
    assert q.coords == pytest.approx((2 / 3, 0.0))


def test_canonical_rep_fixed_circle_named_in_disk1():
    assert canonical_rep(ChartPoint("Disk2", (0.0, 1.0))).chart == "Disk1"
    assert canonical_rep(ChartPoint("Disk1", (1.0, 0.0))).chart == "Disk1"


@given(annulus)
def test_canonical_rep_agrees_on_identified_points(x):
    x = np.array(x)
    p = ChartPoint("Disk1", tuple(x))
    q = ChartPoint("Disk2", tuple(inversion(x)))
    a, b = canonical_rep(p), canonical_rep(q)
    assert a.chart == b.chart
    assert np.allclose(a.coords, b.coords, atol=1e-12)


def test_identified_pair_has_zero_distance():
    p = ChartPoint("Disk1", (1.5, 0.3))
    q = ChartPoint("Disk2", tuple(inversion(np.array([1.5, 0.3]))))
    assert distance(p, q) < 1e-9


def test_torus_distance_wraps():
    assert torus_distance(np.array([0.05, 0.0]), np.array([0.95, 0.0])) == pytest.approx(0.1)


def test_disk_chart_rejects_large_norm():
    with pytest.raises(ValueError):
        ChartPoint("Disk1", (3.0, 0.0))
    with pytest.raises(ValueError):
        ChartPoint("Plane", (0.0, 0.0))


@settings(max_examples=100, deadline=None)
@given(annulus, annulus, annulus)
def test_distance_is_a_metric_on_samples(x, y, z):
    S = GluedSurface()
    st_ = S.normalize(S.states_from_disk(1, np.array([x, y, z])))
    a, b, c = st_
    dab = float(S.distance(a[None], b[None])[0])
    dba = float(S.distance(b[None], a[None])[0])
    dbc = float(S.distance(b[None], c[None])[0])
    dac = float(S.distance(a[None], c[None])[0])
    assert dab == pytest.approx(dba, abs=1e-12)
    assert dac <= dab + dbc + 1e-9


def test_state_roundtrip_through_torus():
    S = GluedSurface()
    x = np.array([[1.2, -0.4], [0.6, 0.1]])
    st_ = S.states_from_disk(1, x)
    assert np.allclose(S.disk_coords(st_), x, atol=1e-9)
