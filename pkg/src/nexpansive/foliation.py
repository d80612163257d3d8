"""Leaf models in the annulus chart.

Stable leaves are the horizontal lines y = c of the Disk1 chart.  Unstable
leaves are modelled three ways: the inversion images of horizontal lines
(circles through the origin), the cubic family, and the quartic family.
A general family x^r + (a^2 - 1) x^(r-2) + r^2 a is kept as an experimental
extrapolation for other r.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
import numpy as np

from . import jets
from .manifolds import CurveGraph, fmt
from .tangency import (TaylorPoly, count_roots, real_roots, tangency_order,
                       DEFAULT_TOL)

DOMAIN = (-2.0, 2.0)
A_RANGE = (-2.0, 2.0)


def family_coeffs(r: int, a) -> list:
    """Ascending coefficients of x^r + (a^2 - 1) x^(r-2) + r^2 a."""
    if r < 2:
        raise ValueError("the polynomial families need r >= 2")
    c = [0] * (r + 1)
    c[0] = r * r * a
    c[r - 2] = c[r - 2] + a * a - 1
    c[r] = 1
    return c


def _check_a(a):
    if not (A_RANGE[0] <= float(a) <= A_RANGE[1]):
        raise ValueError(f"parameter a={a} outside [-2, 2]")


def cubic_family(a: float, n: int = 129) -> CurveGraph:
    """p_a(x) = x^3 + (a^2 - 1) x + 9a over x in [-2, 2]."""
    _check_a(a)
    return CurveGraph.from_polynomial(family_coeffs(3, a), *DOMAIN, n=n, chart="Disk1")


def quartic_family(a: float, n: int = 129) -> CurveGraph:
    """p_a(x) = x^4 + (a^2 - 1) x^2 + 16a over x in [-2, 2]."""
    _check_a(a)
    return CurveGraph.from_polynomial(family_coeffs(4, a), *DOMAIN, n=n, chart="Disk1")


def general_family(r: int, a: float, n: int = 129) -> CurveGraph:
    """Experimental generator beyond the cubic and quartic cases."""
    _check_a(a)
    return CurveGraph.from_polynomial(family_coeffs(r, a), *DOMAIN, n=n, chart="Disk1")


def stable_line(c: float, n: int = 129) -> CurveGraph:
    return CurveGraph.from_polynomial([c], *DOMAIN, n=n, chart="Disk1")


# ---------------------------------------------------------------------------
# inversion circles

def circle_parameters(c: float) -> tuple[float, float]:
    """(radius, centre height) of the inversion image of y = c."""
    return 1.0 / (2 * abs(c)), 1.0 / (2 * c)


def circle_top(c: float, n: int = 129, eps: float = 1e-9) -> CurveGraph:
    """Upper arc (the half farther from the origin) of the image of y = c,
    as an exact graph over |x| < radius."""
    if c == 0:
        raise ValueError("the line y = 0 passes through the removed centre")
    rho, k = circle_parameters(c)
    s = 1.0 if c > 0 else -1.0

    def g(x):
        return k + s * jets.sqrt(rho * rho - x * x)

    return CurveGraph.from_function(g, -rho * (1 - eps), rho * (1 - eps), n, chart="Disk1")


def inversion_model(c: float, n: int = 129) -> list[CurveGraph]:
    """The image of y = c under x / |x|^2, clipped to the annulus and split
    at its vertical tangents into graph pieces.

    With the line parametrised as (t, c), the image point is
    (t, c) / (t^2 + c^2); x turns at t = +-|c| and the annulus condition is
    1/2 <= |(t, c)| <= 2.
    """
    if c == 0 or abs(c) > 2.0:
        raise ValueError("the line y = c must meet the annulus away from the origin")
    t_out = math.sqrt(4.0 - c * c)
    t_in = math.sqrt(max(0.0, 0.25 - c * c))
    ac = abs(c)
    spans = []
    # central piece |t| <= |c| (upper arc), outer pieces |c| <= |t|
    lo, hi = max(-ac, -t_out), min(ac, t_out)
    if t_in == 0.0 or t_in < ac:
        spans.append((lo, hi, t_in))
    spans.append((ac, t_out, t_in))
    spans.append((-t_out, -ac, t_in))
    pieces = []
    for lo, hi, cut in spans:
        ts = np.linspace(lo, hi, 4 * n)
        ts = ts[np.abs(ts) >= cut]
        if len(ts) < 6:
            continue
        pts = np.stack([ts, np.full_like(ts, c)], -1)
        img = pts / np.sum(pts * pts, axis=-1, keepdims=True)
        if lo < 0 < hi and cut > 0:
            # the deleted disk splits the central arc in two
            for sel in (ts < 0, ts > 0):
                pieces.extend(_arc_pieces(img[sel], c, n))
        else:
            pieces.extend(_arc_pieces(img, c, n))
    return pieces


def _arc_pieces(img, c, n):
    img = img[np.argsort(img[:, 0], kind="stable")]
    keep = np.concatenate([[True], np.diff(img[:, 0]) > 1e-14])
    img = img[keep]
    if len(img) < 6:
        return []
    rho, k = circle_parameters(c)
    upper = bool(np.mean((img[:, 1] - k) * np.sign(c)) > 0)
    s = np.sign(c) * (1.0 if upper else -1.0)

    def g(x):
        return k + s * jets.sqrt(rho * rho - x * x)

    x_lo = max(img[0, 0], -rho * (1 - 1e-12))
    x_hi = min(img[-1, 0], rho * (1 - 1e-12))
    if x_hi <= x_lo:
        return []
    return [CurveGraph.from_function(g, x_lo, x_hi, n, chart="Disk1")]


def line_circle_intersections(h: float, c: float) -> np.ndarray:
    """Points of y = h on the image circle of y = c, inside the annulus."""
    # circle: x^2 + y^2 - y / c = 0
    disc = h / c - h * h
    if disc < 0:
        return np.zeros((0, 2))
    xs = np.unique(np.array([-math.sqrt(disc), math.sqrt(disc)]))
    pts = np.stack([xs, np.full_like(xs, h)], -1)
    n = np.linalg.norm(pts, axis=-1)
    return pts[(n >= 0.5 - 1e-12) & (n <= 2.0 + 1e-12)]


# ---------------------------------------------------------------------------
# families and censuses

@dataclass(frozen=True)
class LeafFamily:
    kind: str
    r: int
    param_range: tuple = A_RANGE
    experimental: bool = False

    def coeffs(self, a) -> list:
        if self.kind == "inversion-circles":
            raise ValueError("circles are not polynomial graphs")
        return family_coeffs(self.r, a)

    def curve(self, a, n: int = 129) -> CurveGraph:
        if self.kind == "inversion-circles":
            return circle_top(a, n)
        if self.kind == "stable-lines":
            return stable_line(a, n)
        _check_a(a)
        return CurveGraph.from_polynomial(self.coeffs(a), *DOMAIN, n=n, chart="Disk1")

    def critical_points(self, a) -> np.ndarray:
        d = np.polynomial.polynomial.polyder(np.asarray(self.coeffs(a), dtype=float))
        if not np.any(d):
            return np.zeros(0)
        return real_roots(d, DOMAIN)

    def param_slope_min(self, grid: int = 401) -> float:
        """Minimum of dp_a/da over the domain square (affine in each
        variable after fixing the other, so corners are included)."""
        x = np.linspace(*DOMAIN, grid)
        a = np.linspace(*self.param_range, grid)
        X, A = np.meshgrid(x, a)
        return float(np.min(2 * A * X ** (self.r - 2) + self.r ** 2))


def family(kind: str, r: int | None = None) -> LeafFamily:
    if kind == "cubic":
        return LeafFamily("cubic", 3)
    if kind == "quartic":
        return LeafFamily("quartic", 4)
    if kind == "inversion-circles":
        return LeafFamily("inversion-circles", 2, (-2.0, 2.0))
    if kind == "general":
        if r is None:
            raise ValueError("the general family needs r")
        return LeafFamily("general", r, experimental=True)
    raise ValueError(f"unknown leaf family {kind!r}")


@dataclass
class ModelCensus:
    family: LeafFamily
    max_count: int
    attaining: list
    tangencies: list
    derivative_floor: float
    param_slope_min: float
    rows: list = field(repr=False, default_factory=list)

    @property
    def max_contact_order(self) -> int:
        return max((t[3] for t in self.tangencies), default=-1)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["a", "c", "count", "contact_order"])
            for a, c, n, k in self.rows:
                w.writerow([fmt(a), fmt(c), n, k])

    def summary(self) -> dict:
        return {"family": self.family.kind, "r": self.family.r,
                "experimental": self.family.experimental,
                "max_count": self.max_count,
                "attaining_first": list(self.attaining[0]) if self.attaining else None,
                "n_attaining": len(self.attaining),
                "n_tangencies": len(self.tangencies),
                "max_contact_order": self.max_contact_order,
                "derivative_floor": self.derivative_floor,
                "param_slope_min": self.param_slope_min}


def a_grid(step: float = 0.01, lo: float = -2.0, hi: float = 2.0) -> np.ndarray:
    """Grid built from integer multiples so that exact values such as +-1
    are hit exactly."""
    k0 = int(round(lo / step))
    k1 = int(round(hi / step))
    return np.array([k * step for k in range(k0, k1 + 1)])


def _contact_order(coeffs, x0, c, r, tol) -> int:
    P = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
    tp = TaylorPoly(x0, tuple(P.deriv(k)(x0) / math.factorial(k) if k else P(x0)
                              for k in range(r + 1)))
    line = TaylorPoly(x0, (c,) + (0.0,) * r)
    return tangency_order(tp, line, tol).order


def census(fam: LeafFamily, lines=None, a_values=None, tol: float = DEFAULT_TOL) -> ModelCensus:
    """Distinct intersections of family leaves with stable lines y = c.

    For each a, the critical values of p_a are inserted into the c-sweep,
    together with one height inside every interval they cut out, so the
    maximum over all heights is attained on the sweep.  ``lines`` adds
    further heights.
    """
    if fam.kind == "inversion-circles":
        return _circle_census(fam, lines, a_values, tol)
    a_values = a_grid() if a_values is None else np.asarray(a_values, dtype=float)
    extra = [] if lines is None else [float(c) for c in lines]
    if a_values.size == 0:
        raise ValueError("the a-grid is empty")
    r = fam.r
    rows, tangencies, attaining = [], [], []
    best = 0
    for a in a_values:
        a = float(a)
        coeffs = fam.coeffs(a)
        crit = fam.critical_points(a)
        cvals = sorted(set(float(np.polynomial.polynomial.polyval(x, coeffs)) for x in crit))
        probes = list(cvals)
        bounds = [float(np.polynomial.polynomial.polyval(x, coeffs)) for x in DOMAIN]
        lo = min(bounds + cvals) - 1.0
        hi = max(bounds + cvals) + 1.0
        edges = [lo] + cvals + [hi]
        probes += [0.5 * (u + v) for u, v in zip(edges[:-1], edges[1:])]
        probes += extra
        crit_at = {float(np.polynomial.polynomial.polyval(x, coeffs)): x for x in crit}
        for c in sorted(set(probes)):
            shifted = list(coeffs)
            shifted[0] = Fraction(shifted[0]) - Fraction(c)
            n = count_roots(shifted, DOMAIN)
            k = 0 if n else -1
            if c in crit_at:
                x0 = crit_at[c]
                k = _contact_order(coeffs, x0, c, r, tol)
                tangencies.append((a, float(x0), c, k))
            rows.append((a, c, n, k))
            if n > best:
                best, attaining = n, [(a, c)]
            elif n == best:
                attaining.append((a, c))
    dr = np.polynomial.polynomial.polyder(np.asarray(fam.coeffs(0.0), dtype=float), r)
    floor = float(abs(dr[0])) if len(dr) == 1 else _abs_min(dr)
    return ModelCensus(fam, best, attaining, tangencies, floor, fam.param_slope_min(), rows)


def merge_censuses(parts: list[ModelCensus]) -> ModelCensus:
    """Combine censuses over consecutive a-chunks (order preserved)."""
    best = max(p.max_count for p in parts)
    attaining = [t for p in parts if p.max_count == best for t in p.attaining]
    return ModelCensus(parts[0].family, best, attaining,
                       [t for p in parts for t in p.tangencies],
                       parts[0].derivative_floor, parts[0].param_slope_min,
                       [row for p in parts for row in p.rows])


def _abs_min(coeffs) -> float:
    x = np.linspace(*DOMAIN, 4001)
    return float(np.min(np.abs(np.polynomial.polynomial.polyval(x, coeffs))))


def _circle_census(fam, lines, c_values, tol) -> ModelCensus:
    """Circles (images of y = c) against stable lines y = h."""
    c_values = (np.array([c for c in a_grid(0.05, -2.0, 2.0) if abs(c) > 1e-12])
                if c_values is None else np.asarray(c_values, dtype=float))
    heights = a_grid(0.05, -2.0, 2.0) if lines is None else np.asarray(lines, dtype=float)
    rows, tangencies, attaining = [], [], []
    best = 0
    for c in c_values:
        c = float(c)
        hs = set(float(h) for h in heights)
        if abs(1.0 / c) <= 2.0:
            hs.add(1.0 / c)
        hs = sorted(hs)
        for h in hs:
            if h == 0:
                continue
            n = len(line_circle_intersections(h, c))
            k = 0 if n else -1
            if h == 1.0 / c:
                top = circle_top(c)
                k = tangency_order(taylor_top(top), TaylorPoly(0.0, (h, 0.0, 0.0)), tol).order
                tangencies.append((c, 0.0, h, k))
            rows.append((c, h, n, k))
            if n > best:
                best, attaining = n, [(c, h)]
            elif n == best:
                attaining.append((c, h))
    return ModelCensus(fam, best, attaining, tangencies, float("nan"), float("nan"), rows)


def taylor_top(curve: CurveGraph, r: int = 2) -> TaylorPoly:
    from .tangency import taylor_at

    return taylor_at(curve, 0.0, r)


def circle_curvature_gap(c: float) -> float:
    """|g''(0) - 0| between the image circle of y = c and the stable line
    through its top point; equals the circle's curvature."""
    tp = taylor_top(circle_top(c))
    return 2.0 * abs(tp.coeffs[2])
