from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nexpansive.tangency import (TaylorPoly, count_roots, count_roots_scan, real_roots,
                                 rolle_chain, sturm_sequence, tangency_order, taylor_at)
from nexpansive.manifolds import CurveGraph


def test_count_roots_examples():
    assert count_roots([0, -1, 0, 1], (-2, 2)) == 3
    assert count_roots([0, 0, 0, 1], (-2, 2)) == 1
    assert count_roots([1, 0, 1], (-2, 2)) == 0


def test_count_roots_closed_interval_endpoints():
    assert count_roots([-1, 0, 1], (-1, 1)) == 2
    assert count_roots([-1, 0, 1], (0, 1)) == 1


def test_count_roots_zero_polynomial():
    with pytest.raises(ValueError):
        count_roots([0, 0], (-1, 1))


def test_quartic_roots():
    a = 0.01
    coeffs = [16 * a, 0, a * a - 1, 0, 1]
    roots = np.sort(real_roots(coeffs, (-2, 2)))
    assert count_roots(coeffs, (-2, 2)) == 4
    assert np.allclose(roots, [-0.8944, -0.4473, 0.4473, 0.8944], atol=1e-3)


small = st.integers(-6, 6)


@settings(max_examples=200, deadline=None)
@given(st.lists(small, min_size=2, max_size=7).filter(lambda c: any(c)))
def test_sturm_count_matches_scan_oracle(c):
    # integer coefficients keep roots well separated relative to the grid
    assert count_roots(c, (-2, 2)) == count_roots_scan(c, (-2, 2))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=6, unique=True))
def test_planted_roots_are_found(roots):
    p = np.polynomial.polynomial.polyfromroots([Fraction(z, 10) for z in roots])
    c = [Fraction(v) for v in p]
    assert count_roots(c, (-2, 2)) == len(roots)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-10, 10), min_size=2, max_size=6, unique=True),
       st.integers(1, 5))
def test_rolle_chain_property(roots, r):
    r = min(r, len(roots) - 1)
    p = np.polynomial.polynomial.polyfromroots([Fraction(z, 10) for z in roots])
    rep = rolle_chain([Fraction(v) for v in p], (-1, 1), r)
    assert rep.hypothesis_met and rep.passed


def test_rolle_chain_hypothesis_not_met():
    rep = rolle_chain([1, 0, 1], (-1, 1), 1)
    assert not rep.hypothesis_met and not rep.passed


def test_sturm_sequence_ends_in_constant():
    seq = sturm_sequence([Fraction(v) for v in (0, -1, 0, 1)])
    assert len(seq[-1]) == 1


def test_tangency_order_examples():
    a = TaylorPoly(0.0, (0.0, 0.0, 1.0))
    b = TaylorPoly(0.0, (0.0, 0.0, -1.0))
    assert tangency_order(a, b).order == 1
    c = TaylorPoly(0.0, (0.0, 0.0, 0.0, 1.0))
    d = TaylorPoly(0.0, (0.0, 0.0, 0.0, 0.0))
    assert tangency_order(c, d).order == 2
    assert tangency_order(TaylorPoly(0.0, (1.0, 0.0)), TaylorPoly(0.0, (0.0, 0.0))).order == -1


def test_taylor_at_polynomial_curve():
    g = CurveGraph.from_polynomial([1.0, 2.0, 3.0], -1, 1)
    tp = taylor_at(g, 0.5, 2)
    assert tp.coeffs == pytest.approx((1 + 1 + 0.75, 2 + 3.0, 3.0))


def test_taylor_at_sampled_curve():
    xs = np.linspace(-1, 1, 201)
    g = CurveGraph.from_samples(xs, np.sin(xs))
    tp = taylor_at(g, 0.2, 2)
    assert tp.coeffs[1] == pytest.approx(np.cos(0.2), abs=1e-6)
