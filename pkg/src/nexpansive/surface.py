"""Torus and genus-two surface atlas.

The genus-two surface is glued from two tori.  Each torus carries a disk
chart of radius 2 around a marked point; the open disks of radius 1/2 are
removed and the annuli ``1/2 <= |x| <= 2`` are identified through the
inversion ``psi(x) = x / |x|^2``.

Points are handled in two forms.  :class:`ChartPoint` is the user facing
(chart, coordinates) pair.  Internally, orbits are stored as float arrays of
shape ``(N, 3)`` holding ``(sheet, tx, ty)``: the torus copy (1 or 2) and
torus coordinates in ``[0, 1)^2``.  A disk coordinate ``x`` on sheet ``i``
sits at torus point ``p_i + scale * frame @ x``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TORUS_CHARTS = ("Torus1", "Torus2")
DISK_CHARTS = ("Disk1", "Disk2")
CHARTS = TORUS_CHARTS + DISK_CHARTS

DOMAIN_TOL = 1e-12
CAT_MATRIX = ((2, 1), (1, 1))


def wrap(d):
    """Representative of a torus displacement in [-1/2, 1/2)^2."""
    return d - np.floor(d + 0.5)


def torus_distance(a, b):
    """Flat distance on R^2 / Z^2 (minimum over lattice translates)."""
    d = wrap(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    return np.hypot(d[..., 0], d[..., 1])


def _psi(x):
    x = np.asarray(x, dtype=float)
    n2 = np.sum(x * x, axis=-1, keepdims=True)
    return x / n2


def inversion(x):
    """psi(x) = x / |x|^2 on the closed annulus 1/2 <= |x| <= 2."""
    x = np.asarray(x, dtype=float)
    n = np.linalg.norm(x, axis=-1)
    if np.any(n < 0.5 - DOMAIN_TOL) or np.any(n > 2.0 + DOMAIN_TOL):
        raise ValueError("inversion is only defined on the annulus 1/2 <= |x| <= 2")
    return _psi(x)


@dataclass(frozen=True)
class ChartPoint:
    chart: str
    coords: tuple[float, float]

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise ValueError(f"unknown chart {self.chart!r}")
        c = tuple(float(v) for v in self.coords)
        if len(c) != 2 or not all(np.isfinite(c)):
            raise ValueError("chart coordinates must be two finite reals")
        if self.chart in TORUS_CHARTS:
            c = tuple(float(v) for v in np.mod(c, 1.0))
        elif np.hypot(*c) > 2.0 + DOMAIN_TOL:
            raise ValueError("disk chart coordinates must satisfy |x| <= 2")
        object.__setattr__(self, "coords", c)

    @property
    def sheet(self) -> int:
        return int(self.chart[-1])

    @property
    def is_disk(self) -> bool:
        return self.chart in DISK_CHARTS


def _anosov_frame(matrix) -> np.ndarray:
    """Columns: contracting then expanding unit eigenvector of ``matrix``."""
    m = np.asarray(matrix, dtype=float)
    w, v = np.linalg.eig(m)
    order = np.argsort(np.abs(w))
    frame = np.real(v[:, order])
    frame /= np.linalg.norm(frame, axis=0)
    # fix orientation so the frame is deterministic
    for k in range(2):
        if frame[np.argmax(np.abs(frame[:, k])), k] < 0:
            frame[:, k] *= -1
    return frame


@dataclass(frozen=True)
class GluedSurface:
    """Two tori glued along annuli through the inversion.

    ``placement_scale`` converts disk units to torus units; the frame sends
    the disk x-axis to the contracting and the disk y-axis to the expanding
    eigendirection of ``matrix``, so horizontal disk lines are stable leaves
    of the model dynamics on sheet 1.
    """

    inner_radius: float = 0.5
    outer_radius: float = 2.0
    deleted_radius: float = 0.5
    placement_scale: float = 1.0 / 2048.0
    marked_points: tuple = ((0.0, 0.0), (0.0, 0.0))
    matrix: tuple = CAT_MATRIX
    frame: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "frame", _anosov_frame(self.matrix))

    @property
    def frame_inv(self) -> np.ndarray:
        return np.linalg.inv(self.frame)

    def marked(self, sheet) -> np.ndarray:
        pts = np.asarray(self.marked_points, dtype=float)
        return pts[np.asarray(sheet, dtype=int) - 1]

    # coordinate changes ---------------------------------------------
    def disk_to_torus(self, sheet, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        t = self.marked(sheet) + self.placement_scale * x @ self.frame.T
        return np.mod(t, 1.0)

    def torus_to_disk(self, sheet, t) -> np.ndarray:
        d = wrap(np.asarray(t, dtype=float) - self.marked(sheet))
        return d @ self.frame_inv.T / self.placement_scale

    def states_from_disk(self, sheet, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        sheet = np.broadcast_to(np.asarray(sheet, dtype=float), x.shape[:-1])
        t = self.disk_to_torus(sheet.astype(int), x)
        return np.concatenate([sheet[..., None], t], axis=-1)

    def disk_coords(self, states) -> np.ndarray:
        states = np.asarray(states, dtype=float)
        return self.torus_to_disk(states[..., 0].astype(int), states[..., 1:])

    def normalize(self, states) -> np.ndarray:
        """Move every state to the side of the seam |x| = 1 it belongs to:
        sheet 1 keeps disk norms >= 1, sheet 2 keeps disk norms > 1."""
        states = np.array(states, dtype=float, copy=True)
        sheet = states[..., 0].astype(int)
        x = self.disk_coords(states)
        n = np.linalg.norm(x, axis=-1)
        swap = ((sheet == 1) & (n < 1.0)) | ((sheet == 2) & (n <= 1.0))
        if np.any(swap):
            other = 3 - sheet[swap]
            xs = x[swap]
            if np.any(np.linalg.norm(xs, axis=-1) == 0.0):
                raise ValueError("the marked points are not on the surface")
            states[swap, 0] = other
            states[swap, 1:] = self.disk_to_torus(other, _psi(xs))
        return states

    def to_state(self, p: ChartPoint) -> np.ndarray:
        if p.is_disk:
            return self.states_from_disk(p.sheet, np.asarray(p.coords))[0]
        return np.array([p.sheet, *p.coords], dtype=float)

    def from_state(self, state) -> ChartPoint:
        state = np.asarray(state, dtype=float)
        sheet = int(state[0])
        x = self.disk_coords(state[None])[0]
        if np.linalg.norm(x) > self.outer_radius:
            return ChartPoint(f"Torus{sheet}", tuple(state[1:]))
        return canonical_rep(ChartPoint(f"Disk{sheet}", tuple(x)), self)

    def contains(self, p: ChartPoint) -> bool:
        if p.is_disk:
            return bool(np.hypot(*p.coords) >= self.deleted_radius - DOMAIN_TOL)
        x = self.torus_to_disk(p.sheet, np.asarray(p.coords))
        return bool(np.linalg.norm(x) >= self.deleted_radius - DOMAIN_TOL)

    # metric ---------------------------------------------------------
    def distance(self, a, b) -> np.ndarray:
        """Quotient metric in disk units on states (arrays ``(..., 3)``).

        Each sheet carries the flat torus metric rescaled by
        ``1 / placement_scale``; the sheets are glued along the unit circle
        of the disk charts, which the inversion fixes pointwise.  Distances
        across the seam minimise over the crossing point.
        """
        a = self.normalize(np.atleast_2d(a))
        b = self.normalize(np.atleast_2d(b))
        a, b = np.broadcast_arrays(a, b)
        k = self.placement_scale
        out = torus_distance(a[..., 1:], b[..., 1:]) / k
        cross = a[..., 0] != b[..., 0]
        if np.any(cross):
            out = np.array(out, dtype=float)
            out[cross] = self._seam_distance(a[cross], b[cross])
        return out

    def _seam_distance(self, a, b) -> np.ndarray:
        k = self.placement_scale

        def cost(theta):
            c = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
            ta = self.disk_to_torus(a[:, 0, None].astype(int), c)
            tb = self.disk_to_torus(b[:, 0, None].astype(int), c)
            return (torus_distance(a[:, None, 1:], ta)
                    + torus_distance(b[:, None, 1:], tb)) / k

        m = 128
        grid = np.linspace(0.0, 2 * np.pi, m, endpoint=False)
        vals = cost(np.broadcast_to(grid, (len(a), m)))
        best = grid[np.argmin(vals, axis=1)]
        step = 2 * np.pi / m
        lo, hi = best - step, best + step
        g = (np.sqrt(5.0) - 1) / 2
        x1 = hi - g * (hi - lo)
        x2 = lo + g * (hi - lo)
        f1 = cost(x1[:, None])[:, 0]
        f2 = cost(x2[:, None])[:, 0]
        for _ in range(80):
            left = f1 < f2
            hi = np.where(left, x2, hi)
            lo = np.where(left, lo, x1)
            x2n = np.where(left, x1, lo + g * (hi - lo))
            x1n = np.where(left, hi - g * (hi - lo), x2)
            x1, x2 = x1n, x2n
            f1 = cost(x1[:, None])[:, 0]
            f2 = cost(x2[:, None])[:, 0]
        return np.minimum(np.minimum(f1, f2), vals.min(axis=1))

    def point_distance(self, p: ChartPoint, q: ChartPoint) -> float:
        return float(self.distance(self.to_state(p), self.to_state(q))[0])


def canonical_rep(p: ChartPoint, surface: GluedSurface | None = None) -> ChartPoint:
    """Deterministic representative of the gluing class of ``p``.

    Disk points with norm < 1 keep their chart, norm > 1 moves to the other
    disk through the inversion, and the fixed circle |x| = 1 is named in
    Disk1.  Torus points inside the disk placement are first rewritten in
    their disk chart.
    """
    surface = surface or GluedSurface()
    if p.is_disk:
        x = np.asarray(p.coords, dtype=float)
    else:
        x = surface.torus_to_disk(p.sheet, np.asarray(p.coords))
        if np.linalg.norm(x) > surface.outer_radius:
            return p
    n = float(np.linalg.norm(x))
    if n < surface.deleted_radius - DOMAIN_TOL:
        raise ValueError("point lies in a removed disk")
    if n < 1.0 or (n == 1.0 and p.sheet == 1):
        return ChartPoint(f"Disk{p.sheet}", tuple(x))
    if n == 1.0:
        return ChartPoint("Disk1", tuple(x))
    return ChartPoint(f"Disk{3 - p.sheet}", tuple(_psi(x)))


def distance(p: ChartPoint, q: ChartPoint, surface: GluedSurface | None = None) -> float:
    """Distance between chart points on the genus-two surface."""
    return (surface or GluedSurface()).point_distance(p, q)
