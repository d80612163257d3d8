"""Taylor data of curves, contact order, and exact real-root counting."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-7
MAX_DEGREE = 8


@dataclass(frozen=True)
class TaylorPoly:
    """sum_k c_k (x - x0)^k with c_k = g^(k)(x0) / k!."""

    x0: float
    coeffs: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if not c or not all(math.isfinite(v) for v in c):
            raise ValueError("Taylor coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def r(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float) - self.x0,
                                                self.coeffs)

    def __sub__(self, other: "TaylorPoly") -> "TaylorPoly":
        _check_compatible(self, other)
        return TaylorPoly(self.x0, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))


@dataclass(frozen=True)
class TangencyReport:
    order: int
    r: int
    is_r_tangency: bool
    residual: float
    contact: bool = True

    @property
    def quadratic(self) -> bool:
        return self.order == 1


def taylor_at(curve, x0: float, r: int) -> TaylorPoly:
    """Taylor polynomial of a :class:`~nexpansive.manifolds.CurveGraph`."""
    x0 = float(x0)
    if not (curve.x_lo <= x0 <= curve.x_hi):
        raise ValueError(f"x0={x0} outside the curve interval [{curve.x_lo}, {curve.x_hi}]")
    if curve.exact or r <= _smooth_order(curve):
        d = curve.derivatives(x0, r)
    else:
        d = [richardson_derivative(curve, x0, k) for k in range(r + 1)]
    return TaylorPoly(x0, tuple(float(d[k]) / math.factorial(k) for k in range(r + 1)))


def _smooth_order(curve) -> int:
    spl = curve._spline() if not curve.exact else None
    return curve.order if spl is None else min(curve.order, spl.k - 1)


def richardson_derivative(curve, x0: float, k: int, h: float | None = None) -> float:
    """k-th derivative by central differences with one Richardson step."""
    from math import comb

    if k == 0:
        return float(curve(x0))
    span = min(x0 - curve.x_lo, curve.x_hi - x0)
    h = h or min(1e-2, span / (k + 1))
    if h <= 0:
        raise ValueError("x0 must be interior for finite differences")

    def central(step):
        j = np.arange(k + 1)
        pts = x0 + (k / 2 - j) * step
        w = np.array([(-1) ** i * comb(k, i) for i in j], dtype=float)
        return float(w @ curve(pts)) / step ** k

    return (4 * central(h / 2) - central(h)) / 3


def _check_compatible(a: TaylorPoly, b: TaylorPoly):
    if abs(a.x0 - b.x0) > 1e-12:
        raise ValueError("Taylor polynomials are based at different points")
    if a.r != b.r:
        raise ValueError("Taylor polynomials have different degrees")


def tangency_order(g1: TaylorPoly, g2: TaylorPoly, tol: float = DEFAULT_TOL) -> TangencyReport:
    """Largest k <= r with matching coefficients c_0..c_k.

    Order 0 is a transversal crossing, order 1 a quadratic tangency.  When
    the values differ the curves do not meet at x0 and the order is -1.
    """
    _check_compatible(g1, g2)
    diff = [abs(a - b) for a, b in zip(g1.coeffs, g2.coeffs)]
    order = -1
    for d in diff:
        if d > tol:
            break
        order += 1
    residual = diff[order + 1] if order + 1 < len(diff) else 0.0
    return TangencyReport(order, g1.r, order >= g1.r, residual, contact=order >= 0)


# ---------------------------------------------------------------------------
# exact root counting

def _to_fractions(coeffs) -> list[Fraction]:
    out = []
    for c in coeffs:
        if isinstance(c, Fraction):
            out.append(c)
        elif isinstance(c, int):
            out.append(Fraction(c))
        else:
            v = float(c)
            if not math.isfinite(v):
                raise ValueError("coefficients must be finite")
            out.append(Fraction(v))
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _shift(coeffs: list[Fraction], x0: Fraction) -> list[Fraction]:
    """Coefficients of p(x - x0) given those of p (ascending)."""
    out = [Fraction(0)] * len(coeffs)
    # Horner in the shifted variable
    for c in reversed(coeffs):
        carry = Fraction(0)
        for i in range(len(out)):
            prev = out[i]
            out[i] = carry - x0 * prev
            carry = prev
        out[0] += c
    return out


def _eval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _deriv(p):
    return [i * p[i] for i in range(1, len(p))] or [Fraction(0)]


def _divmod(num, den):
    num = list(num)
    q = [Fraction(0)] * max(1, len(num) - len(den) + 1)
    lead = den[-1]
    while len(num) >= len(den) and any(num):
        k = len(num) - len(den)
        f = num[-1] / lead
        q[k] = f
        for i, c in enumerate(den):
            num[i + k] -= f * c
        num.pop()
        if not num:
            num = [Fraction(0)]
            break
        while len(num) > 1 and num[-1] == 0:
            num.pop()
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return q, num


def _deflate(p, x0):
    while len(p) > 1 and _eval(p, x0) == 0:
        p, _ = _divmod(p, [-x0, Fraction(1)])
    return p


def sturm_sequence(p):
    seq = [p, _deriv(p)]
    while len(seq[-1]) > 1 or seq[-1][0] != 0:
        _, rem = _divmod(seq[-2], seq[-1])
        if len(rem) == 1 and rem[0] == 0:
            break
        seq.append([-c for c in rem])
    return seq


def _sign_changes(seq, x) -> int:
    signs = [s for s in (_eval(q, x) for q in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def _count_exact(p: list[Fraction], a: Fraction, b: Fraction) -> int:
    if len(p) == 1:
        if p[0] == 0:
            raise ValueError("the zero polynomial has infinitely many roots")
        return 0
    boundary = int(_eval(p, a) == 0) + int(_eval(p, b) == 0 and a != b)
    q = _deflate(_deflate(p, a), b)
    if len(q) == 1:
        return boundary
    seq = sturm_sequence(q)
    return boundary + _sign_changes(seq, a) - _sign_changes(seq, b)


def count_roots(poly, interval) -> int:
    """Number of distinct real roots in the closed ``interval``.

    ``poly`` is a :class:`TaylorPoly` or ascending coefficients.  Floats are
    converted to rationals exactly, so the Sturm count is exact for the
    polynomial the floats represent.
    """
    a, b = interval
    if not a < b:
        raise ValueError("interval must satisfy a < b")
    if isinstance(poly, TaylorPoly):
        coeffs = _shift(_to_fractions(poly.coeffs), Fraction(poly.x0))
    else:
        coeffs = _to_fractions(poly)
    if len(coeffs) - 1 > MAX_DEGREE:
        raise ValueError(f"degree above {MAX_DEGREE} is out of scope")
    if all(c == 0 for c in coeffs):
        raise ValueError("the zero polynomial has infinitely many roots")
    try:
        return _count_exact(coeffs, Fraction(a), Fraction(b))
    except (OverflowError, ZeroDivisionError):  # pragma: no cover - defensive
        return count_roots_scan([float(c) for c in coeffs], (a, b))


def real_roots(coeffs, interval, tol: float = 1e-13) -> np.ndarray:
    """Distinct real roots in ``interval`` (sorted), isolated with Sturm
    counts and polished by bisection on the square-free part."""
    p = _to_fractions(coeffs)
    a, b = (Fraction(v) for v in interval)
    if all(c == 0 for c in p):
        raise ValueError("the zero polynomial has infinitely many roots")
    g = p
    dp = _deriv(p)
    if any(dp):
        # square-free part p / gcd(p, p')
        x, y = p, dp
        while any(y):
            _, rem = _divmod(x, y)
            x, y = y, rem
        g, _ = _divmod(p, x)
    roots = []

    def isolate(lo, hi, n):
        if n == 0:
            return
        if n == 1 or hi - lo < Fraction(tol):
            roots.append(_bisect(g, lo, hi, tol))
            return
        # split away from roots so every piece has nonzero ends
        for w in (Fraction(1, 2), Fraction(17, 32), Fraction(15, 32), Fraction(9, 16)):
            mid = lo + (hi - lo) * w
            if _eval(g, mid) != 0:
                break
        left = _count_exact(g, lo, mid)
        isolate(lo, mid, left)
        isolate(mid, hi, n - left)

    total = _count_exact(g, a, b)
    isolate(a, b, total)
    return np.unique(np.round(np.array(sorted(roots)), 15))


def _bisect(g, lo, hi, tol):
    flo, fhi = _eval(g, lo), _eval(g, hi)
    if flo == 0:
        return float(lo)
    if fhi == 0:
        return float(hi)
    lo_f, hi_f = float(lo), float(hi)
    gf = [float(c) for c in g]
    s_lo = flo > 0
    for _ in range(2200):
        mid = 0.5 * (lo_f + hi_f)
        if not lo_f < mid < hi_f:
            break
        v = np.polynomial.polynomial.polyval(mid, gf)
        if v == 0:
            return mid
        if (v > 0) == s_lo:
            lo_f = mid
        else:
            hi_f = mid
    return 0.5 * (lo_f + hi_f)


def count_roots_scan(coeffs, interval, n: int = 100_001, tol: float = 1e-9) -> int:
    """Independent oracle: sign changes on a dense grid, plus grid zeros and
    touching roots found as near-zero local minima of |p|."""
    c = np.asarray(coeffs, dtype=float)
    if not np.any(c):
        raise ValueError("the zero polynomial has infinitely many roots")
    a, b = interval
    xs = np.linspace(a, b, n)
    v = np.polynomial.polynomial.polyval(xs, c)
    scale = max(1.0, float(np.max(np.abs(c))))
    found = []
    # values at rounding level count as exact zeros (roots on grid points)
    zero = np.abs(v) <= 64 * np.finfo(float).eps * scale
    v[zero] = 0.0
    found.extend(xs[zero].tolist())
    s = np.sign(v)
    change = np.nonzero((s[:-1] * s[1:]) < 0)[0]
    found.extend(((xs[change] + xs[change + 1]) / 2).tolist())
    # touching roots: local minima of |p| that refine to ~0
    av = np.abs(v)
    mins = np.nonzero((av[1:-1] <= av[:-2]) & (av[1:-1] <= av[2:]) & ~zero[1:-1]
                      & (s[:-2] == s[2:]))[0] + 1
    dc = np.polynomial.polynomial.polyder(c)
    for i in mins:
        lo, hi = xs[i - 1], xs[i + 1]
        x = _refine_min(c, dc, lo, hi)
        if abs(np.polynomial.polynomial.polyval(x, c)) <= tol * scale:
            found.append(x)
    if not found:
        return 0
    found = np.sort(np.array(found))
    gap = (b - a) / (n - 1)
    return int(1 + np.sum(np.diff(found) > 1.5 * gap))


def _refine_min(c, dc, lo, hi):
    # bisection on p' (the critical point of |p| between lo and hi)
    flo = np.polynomial.polynomial.polyval(lo, dc)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm = np.polynomial.polynomial.polyval(mid, dc)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Rolle chain

@dataclass
class RolleChainReport:
    r: int
    interval: tuple
    root_count: int
    hypothesis_met: bool
    derivative_counts: list = field(default_factory=list)
    required: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.hypothesis_met and all(c >= q for c, q in
                                           zip(self.derivative_counts, self.required))


def poly_derivative(coeffs, n: int) -> list:
    c = np.polynomial.polynomial.polyder(np.asarray(coeffs, dtype=float), n) if n else coeffs
    return [float(v) for v in np.atleast_1d(c)]


def rolle_chain(g, interval, r: int) -> RolleChainReport:
    """Root counts of g', ..., g^(r) when g has at least r + 1 distinct roots."""
    p = _to_fractions(g)
    a, b = interval
    n0 = _count_exact(p, Fraction(a), Fraction(b))
    rep = RolleChainReport(r, (a, b), n0, n0 >= r + 1)
    if not rep.hypothesis_met:
        return rep
    d = p
    for n in range(1, r + 1):
        d = _deriv(d)
        cnt = 0 if (len(d) == 1 and d[0] != 0) else (
            _count_exact(d, Fraction(a), Fraction(b)) if any(d) else math.inf)
        rep.derivative_counts.append(cnt)
        rep.required.append(r + 1 - n)
    return rep
