"""Curves stored as graphs, and local stable/unstable curves of saddles."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import make_interp_spline

from . import jets
from .dynamics import PeriodicOrbitInfo, SmoothMap
from .surface import _psi, wrap

MAX_JET_ORDER = 4
SAMPLES_PER_UNIT = 32
MIN_SAMPLES = 64
DEFAULT_HORIZON = 50


@dataclass(eq=False)
class CurveGraph:
    """The curve ``origin + (x, g(x))`` for x in ``[x_lo, x_hi]``.

    ``jets[i, k]`` holds ``g^(k)(x[i])``.  Derivatives come from ``poly``
    (ascending coefficients) when set, else from ``func`` evaluated on
    jets, else from a quintic interpolating spline of the samples.
    """

    chart: str
    x: np.ndarray
    y: np.ndarray
    jets: np.ndarray
    orientation: int = 1
    origin: np.ndarray = field(default_factory=lambda: np.zeros(2))
    poly: np.ndarray | None = None
    func: Callable | None = None
    spline: object = field(default=None, repr=False)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.origin = np.asarray(self.origin, dtype=float)
        if self.x.ndim != 1 or self.x.shape != self.y.shape or len(self.x) < 2:
            raise ValueError("samples must be two equal-length 1-d arrays")
        if np.any(np.diff(self.x) <= 0):
            raise ValueError("sample abscissas must be strictly increasing")
        if not np.all(np.isfinite(self.y)):
            raise ValueError("curve values must be finite")

    # construction -----------------------------------------------------
    @classmethod
    def from_polynomial(cls, coeffs, x_lo, x_hi, n: int = 129, order: int = MAX_JET_ORDER,
                        chart: str = "plane", origin=(0.0, 0.0)) -> "CurveGraph":
        c = np.asarray(coeffs, dtype=float)
        xs = np.linspace(x_lo, x_hi, n)
        P = np.polynomial.Polynomial(c)
        J = np.stack([P.deriv(k)(xs) if k else P(xs) for k in range(order + 1)], -1)
        return cls(chart, xs, P(xs), J, origin=np.asarray(origin, dtype=float), poly=c)

    @classmethod
    def from_function(cls, func, x_lo, x_hi, n: int = 129, order: int = MAX_JET_ORDER,
                      chart: str = "plane", origin=(0.0, 0.0)) -> "CurveGraph":
        """``func`` must accept floats, arrays and univariate jets."""
        xs = np.linspace(x_lo, x_hi, n)
        J = _func_derivatives(func, xs, order)
        return cls(chart, xs, J[:, 0], J, origin=np.asarray(origin, dtype=float), func=func)

    @classmethod
    def from_samples(cls, x, y, order: int = MAX_JET_ORDER, chart: str = "plane",
                     origin=(0.0, 0.0), orientation: int = 1) -> "CurveGraph":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        k = min(5, len(x) - 1)
        spl = make_interp_spline(x, y, k=k)
        J = np.stack([spl(x, nu=d) if d <= k else np.zeros_like(x)
                      for d in range(order + 1)], -1)
        return cls(chart, x, y, J, orientation, np.asarray(origin, dtype=float), spline=spl)

    # evaluation -------------------------------------------------------
    @property
    def x_lo(self) -> float:
        return float(self.x[0])

    @property
    def x_hi(self) -> float:
        return float(self.x[-1])

    @property
    def order(self) -> int:
        return self.jets.shape[1] - 1

    @property
    def exact(self) -> bool:
        return self.poly is not None or self.func is not None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.poly is not None:
            return np.polynomial.polynomial.polyval(x, self.poly)
        if self.func is not None:
            return np.asarray(self.func(x), dtype=float)
        return self._spline()(x)

    def _spline(self):
        if self.spline is None:
            self.spline = make_interp_spline(self.x, self.y, k=min(5, len(self.x) - 1))
        return self.spline

    def derivatives(self, x0, order: int) -> list:
        """``[g(x0), g'(x0), ..., g^(order)(x0)]`` (x0 may be an array)."""
        x0 = np.asarray(x0, dtype=float)
        if self.poly is not None:
            P = np.polynomial.Polynomial(self.poly)
            return [P.deriv(k)(x0) if k else P(x0) for k in range(order + 1)]
        if self.func is not None:
            J = _func_derivatives(self.func, np.atleast_1d(x0), order)
            return [J[:, k].reshape(x0.shape) for k in range(order + 1)]
        spl = self._spline()
        return [spl(x0, nu=k) if k <= spl.k else np.zeros_like(x0) for k in range(order + 1)]

    def points(self, x=None) -> np.ndarray:
        """Absolute chart coordinates of the curve."""
        x = self.x if x is None else np.asarray(x, dtype=float)
        return self.origin + np.stack([x, self(x)], -1)

    def arc_length(self, n: int = 4001) -> float:
        pts = self.points(np.linspace(self.x_lo, self.x_hi, n))
        return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))

    def restrict(self, x_lo, x_hi, n: int | None = None) -> "CurveGraph":
        if not (self.x_lo <= x_lo < x_hi <= self.x_hi):
            raise ValueError("restriction interval must lie inside the curve")
        n = n or len(self.x)
        xs = np.linspace(x_lo, x_hi, n)
        if self.poly is not None:
            return CurveGraph.from_polynomial(self.poly, x_lo, x_hi, n, self.order,
                                              self.chart, self.origin)
        if self.func is not None:
            return CurveGraph.from_function(self.func, x_lo, x_hi, n, self.order,
                                            self.chart, self.origin)
        return CurveGraph.from_samples(xs, self(xs), self.order, self.chart,
                                       self.origin, self.orientation)

    def consistency_error(self) -> float:
        """Largest mismatch between stored first jets and centred divided
        differences of neighbouring samples, relative to the jet scale."""
        if len(self.x) < 3 or self.order < 1:
            return 0.0
        dd = (self.y[2:] - self.y[:-2]) / (self.x[2:] - self.x[:-2])
        scale = max(1.0, float(np.max(np.abs(self.jets[:, 1]))))
        h = float(np.max(np.diff(self.x)))
        curv = float(np.max(np.abs(self.jets[:, min(3, self.order)]))) if self.order >= 3 else 0.0
        return float(np.max(np.abs(dd - self.jets[1:-1, 1]))) / scale - curv * h * h / 6

    def to_csv(self, path, order: int | None = None) -> None:
        write_curve_csv(path, [self], order)


def _func_derivatives(func, xs, order) -> np.ndarray:
    xj = jets.Jet.variable(xs, 0, order)
    val = func(xj)
    if not jets.is_jet(val):
        val = jets.Jet.constant(np.broadcast_to(np.asarray(val, dtype=float), xs.shape), order)
    return np.stack([val.partial(k, 0) for k in range(order + 1)], -1)


def write_curve_csv(path, curves, order: int | None = None) -> None:
    order = curves[0].order if order is None else order
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["piece", "x", "y"] + [f"jet_{k}" for k in range(1, order + 1)])
        for i, c in enumerate(curves):
            for row in range(len(c.x)):
                w.writerow([i, fmt(c.x[row] + c.origin[0]), fmt(c.y[row] + c.origin[1])]
                           + [fmt(c.jets[row, k]) for k in range(1, order + 1)])


def fmt(v) -> str:
    return f"{float(v):.17g}"


# ---------------------------------------------------------------------------
# local manifolds

@dataclass
class LocalManifold:
    info: PeriodicOrbitInfo
    side: str
    delta: float
    curve: CurveGraph
    horizon: int
    membership: float
    points: np.ndarray = field(repr=False)


class ManifoldError(RuntimeError):
    pass


def local_stable_curve(f: SmoothMap, info: PeriodicOrbitInfo, delta: float,
                       order: int = MAX_JET_ORDER, horizon: int = DEFAULT_HORIZON,
                       seed: float = 1e-9, max_generations: int = 400) -> LocalManifold:
    """Local stable curve through a saddle, grown by backward iteration of
    a short fundamental segment along the contracting direction.

    Membership at ``horizon`` is checked by orbit bookkeeping: a point born
    in generation g has its first g forward iterates stored in earlier
    generations and the rest inside the seed segment, which is iterated
    forward directly.
    """
    return _local_curve(f, info, delta, order, horizon, seed, max_generations, "stable")


def local_unstable_curve(f: SmoothMap, info: PeriodicOrbitInfo, delta: float,
                         order: int = MAX_JET_ORDER, horizon: int = DEFAULT_HORIZON,
                         seed: float = 1e-9, max_generations: int = 400) -> LocalManifold:
    return _local_curve(f, info, delta, order, horizon, seed, max_generations, "unstable")


def inverse_map(f: SmoothMap) -> SmoothMap:
    return SmoothMap(f"{f.name}^-1", f.domain, f.inverse, f.forward, None,
                     params=dict(f.params), surface=f.surface, jet_order=1)


def _local_curve(f, info, delta, order, horizon, seed, max_gen, side) -> LocalManifold:
    if f.domain == "glued":
        raise ValueError("local curves are computed on torus or planar charts")
    if not (info.hyperbolic and info.is_saddle):
        raise ValueError("local manifolds need a hyperbolic saddle")
    if order > MAX_JET_ORDER:
        raise ValueError(f"jets are kept up to order {MAX_JET_ORDER}")
    l = info.period
    p = np.asarray(info.point, dtype=float)
    v = info.direction(side)
    mods = np.sort(np.abs(np.asarray(info.multipliers)))
    rate = mods[0] if side == "stable" else 1.0 / mods[1]
    back = f.inverse if side == "stable" else f.forward
    fwd = f.forward if side == "stable" else f.inverse

    def step(pts, fn, k):
        for _ in range(k):
            pts = fn(pts)
        return pts

    # fundamental segment on both branches: |t| in [rate * seed, seed]
    m = 48
    frac = rate ** (np.arange(m) / m)
    ts = np.concatenate([-seed * frac[::-1], seed * frac])
    gen0 = p + ts[:, None] * v
    if f.domain == "torus":
        gen0 = np.mod(gen0, 1.0)
    gens = [gen0]
    while len(gens) <= max_gen:
        d = f.distance(gens[-1], p)
        if np.all(d > delta):
            break
        gens.append(step(gens[-1], back, l))
    else:
        raise ManifoldError(f"{side} curve did not reach size {delta} in {max_gen} generations"
                            f" (last radius {float(np.max(f.distance(gens[-1], p))):.3g})")
    G = np.stack(gens)  # (generation, sample, 2)

    # forward-orbit distances: generation g at time n*l sits at generation g-n
    dists = f.distance(G, p)                       # (gen, sample)
    # the seed segment itself only needs a few forward steps: once the
    # contraction has shrunk it well below its size, further doubles carry
    # nothing but amplified rounding error along the other direction
    tail = gen0.copy()
    tail_max = np.zeros(len(gen0))
    for _ in range(min(horizon, int(math.ceil(math.log(1e-2) / math.log(rate))))):
        tail = step(tail, fwd, l)
        tail_max = np.maximum(tail_max, f.distance(tail, p))
    prefix = np.maximum.accumulate(dists, axis=0)
    ok = (prefix <= delta) & (tail_max[None, :] <= delta)
    # intermediate times inside one period
    if l > 1:
        orbit_p = [p]
        for _ in range(l - 1):
            orbit_p.append(fwd(orbit_p[-1][None])[0])
        for j in range(1, l):
            inter = step(G.reshape(-1, 2), fwd, j).reshape(G.shape)
            ok &= f.distance(inter, orbit_p[j]) <= delta

    near = dists <= delta
    membership = float(ok.sum() / max(1, near.sum()))
    pts = np.concatenate([G[ok], p[None]])
    disp = f.displacement(pts, p)
    curve = _graph_through(disp, order, f.domain, p)
    if curve is None:
        raise ManifoldError("local curve is not a graph over the chart x-axis")
    return LocalManifold(info, side, delta, curve, horizon, membership, pts)


def _graph_through(disp, order, domain, origin):
    """Fit a graph over x to displacements; None if not a graph."""
    order_idx = np.argsort(disp[:, 0], kind="stable")
    d = disp[order_idx]
    keep = np.concatenate([[True], np.diff(d[:, 0]) > 1e-15])
    d = d[keep]
    if len(d) < 6:
        return None
    n = max(MIN_SAMPLES, int(math.ceil(SAMPLES_PER_UNIT * np.sum(np.linalg.norm(np.diff(d, axis=0), axis=1)))))
    spl = make_interp_spline(d[:, 0], d[:, 1], k=5)
    xs = np.linspace(d[0, 0], d[-1, 0], n)
    # keep exact zero on the grid when the curve crosses the base point
    xs = np.unique(np.concatenate([xs, [0.0]])) if d[0, 0] < 0 < d[-1, 0] else xs
    chart = "Torus1" if domain == "torus" else "plane"
    return CurveGraph.from_samples(xs, spl(xs), order, chart, origin)


# ---------------------------------------------------------------------------
# iterating curves

def curve_points(curve: CurveGraph, tol: float = 1e-3) -> np.ndarray:
    """Dense polyline samples of the curve (absolute chart coordinates)."""
    n = max(len(curve.x), 2049)
    return curve.points(np.linspace(curve.x_lo, curve.x_hi, n))


def _map_chart_points(f: SmoothMap, chart: str, pts: np.ndarray, n: int) -> np.ndarray:
    if f.domain != "glued":
        out = f.iterate(pts, n)
        if f.domain == "torus":
            # unwrap along the polyline so the image is a connected lift
            steps = wrap(np.diff(out, axis=0))
            start = pts[0] + wrap(out[0] - pts[0]) if n == 0 else out[0]
            out = np.concatenate([start[None], start + np.cumsum(steps, axis=0)])
        return out
    S = f.surface
    sheet = int(chart[-1])
    states = S.normalize(S.states_from_disk(sheet, pts))
    img = f.iterate(states, n)
    x = S.disk_coords(img)
    other = img[:, 0] != sheet
    if np.any(other):
        x[other] = _psi(S.disk_coords(img[other]))
    if np.any(np.linalg.norm(x, axis=-1) > S.outer_radius + 1e-9):
        raise ManifoldError(f"curve leaves the {chart} chart after {n} steps")
    return x


def split_graph_pieces(pts: np.ndarray, order: int, chart: str,
                       min_points: int = 6) -> list[CurveGraph]:
    """Split a polyline at x-turning points and fit one graph per piece."""
    dx = np.diff(pts[:, 0])
    sign = np.sign(dx)
    # carry signs through flat steps
    for i in range(1, len(sign)):
        if sign[i] == 0:
            sign[i] = sign[i - 1]
    cuts = np.nonzero(sign[1:] != sign[:-1])[0] + 1
    bounds = np.concatenate([[0], cuts, [len(pts) - 1]])
    pieces = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        seg = pts[a:b + 1]
        orient = 1
        if seg[-1, 0] < seg[0, 0]:
            seg = seg[::-1]
            orient = -1
        keep = np.concatenate([[True], np.diff(seg[:, 0]) > 0])
        seg = seg[keep]
        if len(seg) < min_points:
            continue
        pieces.append(CurveGraph.from_samples(seg[:, 0], seg[:, 1], order, chart,
                                              (0.0, 0.0), orient))
    return pieces


def iterate_curve(f: SmoothMap, curve: CurveGraph, n: int):
    """Image of ``curve`` under f^n as a graph, or a list of graph pieces
    when the image fails the vertical-line test."""
    if n == 0:
        return curve
    pts = curve_points(curve)
    img = _map_chart_points(f, curve.chart, pts, n)
    pieces = split_graph_pieces(img, curve.order, curve.chart)
    if not pieces:
        raise ManifoldError("image curve degenerates to a point")
    return pieces[0] if len(pieces) == 1 else pieces


def polyline_length(pts) -> float:
    return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))


def diameter(pts) -> float:
    pts = np.asarray(pts, dtype=float)
    # farthest pair: exact on the convex hull for larger samples
    if len(pts) > 64:
        from scipy.spatial import ConvexHull, QhullError

        try:
            pts = pts[ConvexHull(pts).vertices]
        except QhullError:
            pass
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt(np.max(np.sum(d * d, axis=-1))))
