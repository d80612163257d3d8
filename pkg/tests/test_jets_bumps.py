import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nexpansive import bumps, jets
from nexpansive.jets import Jet


def test_variable_jet_of_polynomial():
    x, y = Jet.variables([0.3, -0.2], 3)
    u = x ** 3 + 2 * x * y - y ** 2
    assert u.partial(0, 0) == pytest.approx(0.027 - 0.12 - 0.04)
    assert u.partial(1, 0) == pytest.approx(3 * 0.09 + 2 * -0.2)
    assert u.partial(0, 1) == pytest.approx(2 * 0.3 + 0.4)
    assert u.partial(3, 0) == pytest.approx(6.0)
    assert u.partial(1, 1) == pytest.approx(2.0)


def test_exp_log_roundtrip_jets():
    x, _ = Jet.variables([0.7, 0.0], 4)
    z = jets.log(jets.exp(x))
    assert z.partial(0, 0) == pytest.approx(0.7)
    assert z.partial(1, 0) == pytest.approx(1.0)
    for k in range(2, 5):
        assert abs(z.partial(k, 0)) < 1e-12


def test_sin_cos_derivatives():
    x, _ = Jet.variables([0.4, 0.0], 3)
    s = jets.sin(x)
    assert s.partial(1, 0) == pytest.approx(math.cos(0.4))
    assert s.partial(2, 0) == pytest.approx(-math.sin(0.4))
    assert s.partial(3, 0) == pytest.approx(-math.cos(0.4))


@given(st.floats(-3, 3), st.floats(0.01, 0.5), st.floats(0.6, 2.0))
def test_plateau_range_and_flatness(r, inner, outer):
    v = bumps.plateau(r, inner, outer)
    assert 0.0 <= v <= 1.0
    if r <= inner:
        assert v == 1.0
    if r >= outer:
        assert v == 0.0


def test_plateau_is_monotone():
    r = np.linspace(0, 1.2, 2001)
    v = bumps.plateau(r, 0.25, 1.0)
    assert np.all(np.diff(v) <= 0)


def test_smooth_step_jets_match_finite_differences():
    t0, h = 0.37, 1e-5
    t, _ = Jet.variables([t0, 0.0], 2)
    j = bumps.smooth_step(t)
    fd1 = (bumps.smooth_step(t0 + h) - bumps.smooth_step(t0 - h)) / (2 * h)
    assert j.partial(1, 0) == pytest.approx(fd1, rel=1e-6)


def test_radial_plateau_jets_finite_at_origin():
    x, y = Jet.variables([0.0, 0.0], 3)
    j = bumps.radial_plateau(x, y, 0.2, 0.5)
    assert float(j.partial(0, 0)) == 1.0
    assert all(float(j.partial(i, k)) == 0.0 for i in range(4) for k in range(4 - i) if i + k)


def test_plateau_rejects_bad_radii():
    with pytest.raises(ValueError):
        bumps.plateau(0.3, 1.0, 0.5)
