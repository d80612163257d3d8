"""Smooth maps with derivative jets.

Maps act on float arrays of points: shape ``(N, 2)`` for the torus and the
plane, ``(N, 3)`` (sheet, tx, ty) for the genus-two surface.  Where a map has
a closed form it also exposes ``formula(x, y)``, written with the generic
functions of :mod:`nexpansive.jets`, which gives exact Taylor jets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import bumps, jets
from .surface import CAT_MATRIX, GluedSurface, _psi, torus_distance, wrap

FD_STEP = 1e-4
HYPERBOLIC_TOL = 1e-9
JACOBIAN_GRID = 64


@dataclass(frozen=True, eq=False)
class SmoothMap:
    name: str
    domain: str
    forward: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    formula: Callable | None = None
    params: dict = field(default_factory=dict)
    surface: GluedSurface | None = None
    jet_order: int = 4

    def __call__(self, pts):
        return self.forward(np.asarray(pts, dtype=float))

    @property
    def dim(self) -> int:
        return 3 if self.domain == "glued" else 2

    def iterate(self, pts, n: int) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        step = self.forward if n >= 0 else self.inverse
        for _ in range(abs(n)):
            pts = step(pts)
        return pts

    def orbit(self, pts, n_back: int, n_fwd: int) -> np.ndarray:
        """Array of shape ``(n_back + n_fwd + 1, ...)`` indexed from -n_back."""
        pts = np.asarray(pts, dtype=float)
        out = np.empty((n_back + n_fwd + 1,) + pts.shape)
        out[n_back] = pts
        cur = pts
        for i in range(1, n_fwd + 1):
            cur = self.forward(cur)
            out[n_back + i] = cur
        cur = pts
        for i in range(1, n_back + 1):
            cur = self.inverse(cur)
            out[n_back - i] = cur
        return out

    def distance(self, a, b) -> np.ndarray:
        if self.domain == "torus":
            return torus_distance(a, b)
        if self.domain == "glued":
            return self.surface.distance(a, b)
        d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
        return np.hypot(d[..., 0], d[..., 1])

    def displacement(self, a, b) -> np.ndarray:
        d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
        return wrap(d) if self.domain == "torus" else d

    def jet(self, point, order: int):
        """Taylor jets ``(u, v)`` of the two components at ``point`` (or a
        batch of points); finite differences when no closed form exists."""
        if order > self.jet_order:
            raise ValueError(f"{self.name} carries jets up to order {self.jet_order}")
        if self.formula is None:
            if order > 1:
                raise ValueError(f"{self.name} has no closed form; only order-1 jets")
            return _fd_jet(self, point)
        x, y = jets.Jet.variables(point, order)
        return self.formula(x, y)

    def jacobian(self, point) -> np.ndarray:
        if self.formula is None:
            return fd_jacobian(self, point)
        u, v = self.jet(point, 1)
        return np.stack([u.gradient(), v.gradient()], axis=-2)


def fd_jacobian(f: SmoothMap, point, h: float = FD_STEP) -> np.ndarray:
    """Central differences with step ``h``; torus jumps are unwrapped."""
    point = np.asarray(point, dtype=float)
    if f.domain == "glued":
        raise ValueError("use chart expressions for derivatives on the glued surface")
    cols = []
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        cols.append(f.displacement(f(point + e), f(point - e)) / (2 * h))
    return np.stack(cols, axis=-1)


def _fd_jet(f: SmoothMap, point):
    point = np.asarray(point, dtype=float)
    jac = fd_jacobian(f, point)
    val = f(point)
    out = []
    for row in range(2):
        c = np.zeros((2, 2) + val.shape[:-1])
        c[0, 0] = val[..., row]
        c[1, 0] = jac[..., row, 0]
        c[0, 1] = jac[..., row, 1]
        out.append(jets.Jet(c, 1))
    return tuple(out)


# ---------------------------------------------------------------------------
# linear Anosov substrate

def _check_unimodular(matrix) -> np.ndarray:
    m = np.asarray(matrix)
    if m.shape != (2, 2) or not np.all(np.equal(np.mod(m, 1), 0)):
        raise ValueError("expected a 2x2 integer matrix")
    m = m.astype(int)
    if abs(round(np.linalg.det(m))) != 1:
        raise ValueError("matrix must have determinant +-1")
    return m


def linear_toral_map(matrix=CAT_MATRIX) -> SmoothMap:
    m = _check_unimodular(matrix)
    mf = m.astype(float)
    minv = np.rint(np.linalg.inv(mf))

    def forward(t):
        return np.mod(t @ mf.T, 1.0)

    def inverse(t):
        return np.mod(t @ minv.T, 1.0)

    def formula(x, y):
        return mf[0, 0] * x + mf[0, 1] * y, mf[1, 0] * x + mf[1, 1] * y

    return SmoothMap("linear", "torus", forward, inverse, formula,
                     params={"matrix": m.tolist()})


def is_hyperbolic_matrix(matrix) -> bool:
    w = np.linalg.eigvals(np.asarray(matrix, dtype=float))
    return bool(np.all(np.abs(np.abs(w) - 1.0) > HYPERBOLIC_TOL))


# ---------------------------------------------------------------------------
# derived-from-Anosov map
#
# Recipe: in eigen-coordinates (u, s) around the fixed point the map is
#   (u, s) -> (u (lu + ku a(u) b(s)),  s (ls + ks a(u) c(s)))
# with ku = strength (core - lu), ks = strength (core - ls).  a is a plateau
# in |u|, b a plateau in |s| supported in [R/2, R], and c a thin profile in
# |s| that equals 1 near 0 and vanishes before R/2.  The second component
# may use a narrower plateau a_s in |u|; since the first component ignores s
# wherever c is nonzero, the Jacobian stays triangular there and the
# determinant does not see the slope of a_s.  At strength 1 the map
# is the conformal dilation by `core` on the core box, it equals the linear
# map outside the box |u|, |s| < R, and lines parallel to the contracting
# eigenvector are mapped to such lines wherever |s| < R/2.

@dataclass(frozen=True)
class _BoxDA:
    matrix: np.ndarray
    source: np.ndarray
    radius: float
    strength: float
    core: float
    s_core_u: float | None = None

    def __post_init__(self):
        m = self.matrix.astype(float)
        w, v = np.linalg.eig(m)
        w = np.real(w)
        order = np.argsort(np.abs(w))[::-1]
        frame = np.real(v[:, order])
        frame /= np.linalg.norm(frame, axis=0)
        object.__setattr__(self, "lu", float(w[order[0]]))
        object.__setattr__(self, "ls", float(w[order[1]]))
        object.__setattr__(self, "E", frame)
        object.__setattr__(self, "Einv", np.linalg.inv(frame))
        object.__setattr__(self, "minv", np.rint(np.linalg.inv(m)))

    @property
    def u_inner(self):
        return self.radius / 4

    @property
    def s_inner(self):
        return self.radius / 128

    def _s_profile(self, s_abs):
        si = self.s_inner
        sig = bumps.smooth_step((s_abs - si) / si)
        big = np.asarray(jets.value_of(s_abs)) > si
        ratio = jets.where(big, 2 * si / jets.substitute(s_abs, ~big, 2 * si), 1.0)
        q = (1.0 - sig) + sig * ratio
        return q * bumps.plateau(s_abs, self.radius / 8, self.radius / 2)

    def local(self, u, s):
        R = self.radius
        ku = self.strength * (self.core - self.lu)
        ks = self.strength * (self.core - self.ls)
        ua = jets.where(np.asarray(jets.value_of(u)) < 0, -u, u)
        sa = jets.where(np.asarray(jets.value_of(s)) < 0, -s, s)
        a = bumps.plateau(ua, self.u_inner, R)
        b = bumps.plateau(sa, R / 2, R)
        c = self._s_profile(sa)
        if self.s_core_u is not None:
            a_s = bumps.plateau(ua, self.s_core_u, 2 * self.s_core_u)
        else:
            a_s = a
        return u * (self.lu + ku * a * b), s * (self.ls + ks * a_s * c)

    def to_local(self, t):
        d = wrap(np.asarray(t, dtype=float) - self.source)
        us = d @ self.Einv.T
        return us[..., 0], us[..., 1]

    def in_box(self, u, s):
        return (np.abs(u) < self.radius) & (np.abs(s) < self.radius)

    def forward(self, t):
        t = np.asarray(t, dtype=float)
        out = np.mod(t @ self.matrix.T.astype(float), 1.0)
        u, s = self.to_local(t)
        box = self.in_box(u, s)
        if np.any(box):
            G, H = self.local(u[box], s[box])
            out[box] = np.mod(self.source + np.stack([G, H], -1) @ self.E.T, 1.0)
        return out

    def inverse(self, t):
        t = np.asarray(t, dtype=float)
        out = np.mod(t @ self.minv.T, 1.0)
        u0, s0 = self.to_local(out)
        box = self.in_box(u0, s0)
        if np.any(box):
            tu, ts = self.lu * u0[box], self.ls * s0[box]
            u, s = self._solve(tu, ts, u0[box], s0[box])
            out[box] = np.mod(self.source + np.stack([u, s], -1) @ self.E.T, 1.0)
        return out

    def _solve(self, tu, ts, u, s):
        """Damped Newton for local(u, s) = (tu, ts)."""
        u, s = u.copy(), s.copy()
        for _ in range(100):
            ju, js = self.local(jets.Jet.variable(u, 0, 1) + 0 * s,
                                jets.Jet.variable(s, 1, 1) + 0 * u)
            ru, rs = ju.value - tu, js.value - ts
            res = np.hypot(ru, rs)
            if np.all(res < 1e-16):
                break
            a, b = ju.coeffs[1, 0], ju.coeffs[0, 1]
            c, d = js.coeffs[1, 0], js.coeffs[0, 1]
            det = a * d - b * c
            du = (d * ru - b * rs) / det
            ds = (a * rs - c * ru) / det
            lam = np.ones_like(u)
            for _ in range(30):
                nu, ns = u - lam * du, s - lam * ds
                gu, gs = self.local(nu, ns)
                worse = np.hypot(gu - tu, gs - ts) > res
                if not np.any(worse):
                    break
                lam = np.where(worse, lam / 2, lam)
            u, s = u - lam * du, s - lam * ds
        return u, s

    def formula(self, x, y):
        # jets of the map at base points (x, y); lifts chosen from the values
        t = np.stack([np.asarray(jets.value_of(x)), np.asarray(jets.value_of(y))], -1)
        shift = np.floor(t - self.source + 0.5)
        dx = x - (self.source[0] + shift[..., 0])
        dy = y - (self.source[1] + shift[..., 1])
        u = self.Einv[0, 0] * dx + self.Einv[0, 1] * dy
        s = self.Einv[1, 0] * dx + self.Einv[1, 1] * dy
        uv, sv = np.asarray(jets.value_of(u)), np.asarray(jets.value_of(s))
        box = self.in_box(uv, sv)
        G, H = self.local(jets.substitute(u, ~box, 0.0), jets.substitute(s, ~box, 0.0))
        m = self.matrix.astype(float)
        lin_x = m[0, 0] * x + m[0, 1] * y
        lin_y = m[1, 0] * x + m[1, 1] * y
        bx = self.source[0] + self.E[0, 0] * G + self.E[0, 1] * H
        by = self.source[1] + self.E[1, 0] * G + self.E[1, 1] * H
        # box images are expressed relative to the lifted source; bring the
        # linear branch to the same lift so values agree mod 1
        return jets.where(box, bx, lin_x), jets.where(box, by, lin_y)

    def min_jacobian_det(self, n: int = JACOBIAN_GRID) -> float:
        g = np.linspace(-self.radius, self.radius, n)
        U, S = np.meshgrid(g, g)
        ju, js = self.local(jets.Jet.variable(U, 0, 1), jets.Jet.variable(S, 1, 1))
        det = ju.coeffs[1, 0] * js.coeffs[0, 1] - ju.coeffs[0, 1] * js.coeffs[1, 0]
        return float(det.min())


def da_map(source=(0.0, 0.0), radius: float = 0.2, strength: float = 1.0,
           matrix=CAT_MATRIX, core: float = 4.0) -> SmoothMap:
    """Derived-from-Anosov map: the linear map with its fixed point
    ``source`` turned into a source by a box-supported modification."""
    m = _check_unimodular(matrix)
    if not is_hyperbolic_matrix(m):
        raise ValueError("DA construction needs a hyperbolic matrix")
    src = np.mod(np.asarray(source, dtype=float), 1.0)
    if torus_distance(np.mod(src @ m.T, 1.0), src) > 1e-12:
        raise ValueError("source must be a fixed point of the linear map")
    if not 0 < radius < 0.25:
        raise ValueError("radius must lie in (0, 1/4) so the box embeds in the torus")
    da = _BoxDA(m, src, float(radius), float(strength), float(core))
    det = da.min_jacobian_det()
    if det <= 0:
        raise ValueError(f"strength {strength} breaks invertibility (min det {det:.3g})")
    return SmoothMap("da", "torus", da.forward, da.inverse, da.formula,
                     params={"source": src.tolist(), "radius": radius,
                             "strength": strength, "matrix": m.tolist(),
                             "core": core, "min_det": det},
                     jet_order=4)


# ---------------------------------------------------------------------------
# genus-two map

GENUS2_VARIANTS = {"quadratic": 2, "cubic": 3, "quartic": 4}


@dataclass(frozen=True)
class Genus2Charts:
    """Chart expressions of the genus-two map on the disk charts."""

    factor: float = 4.0

    def disk1(self, x):
        return self.factor * np.asarray(x, dtype=float)

    def disk2(self, y):
        return np.asarray(y, dtype=float) / self.factor


def genus2_map(variant: str = "quadratic", surface: GluedSurface | None = None,
               radius: float = 0.2) -> SmoothMap:
    """Diffeomorphism of the genus-two surface glued from two DA tori.

    Sheet 1 runs the DA map (a source at the marked point, x -> 4x in the
    disk chart); sheet 2 runs its inverse (a sink, x -> x/4).  ``variant``
    only selects the leaf model attached for tangency experiments.
    """
    if variant not in GENUS2_VARIANTS:
        raise ValueError(f"variant must be one of {sorted(GENUS2_VARIANTS)}")
    surface = surface or GluedSurface()
    if 2 * surface.placement_scale > radius / 128:
        raise ValueError("disk placement must sit inside the conformal core")
    # the stable direction is only dilated on the disk placement itself, so
    # orbits leaving the disks stop spreading along stable lines at once
    s_core = 2.5 * surface.placement_scale
    das = [_BoxDA(np.asarray(surface.matrix, dtype=int),
                  np.asarray(surface.marked_points[i], dtype=float),
                  radius, 1.0, 4.0, s_core) for i in range(2)]
    for da in das:
        if da.min_jacobian_det() <= 0:
            raise ValueError("genus-two construction lost invertibility")

    def disk_norm(states):
        return np.linalg.norm(surface.disk_coords(states), axis=-1)

    def forward(states):
        states = np.array(np.atleast_2d(states), dtype=float, copy=True)
        n = disk_norm(states)
        # annulus points named on sheet 2 are moved to sheet 1 first
        move = (states[:, 0] == 2) & (n <= surface.outer_radius)
        if np.any(move):
            x = _psi(surface.disk_coords(states[move]))
            states[move] = surface.states_from_disk(1, x)
        out = states.copy()
        s1 = states[:, 0] == 1
        if np.any(s1):
            out[s1, 1:] = das[0].forward(states[s1, 1:])
        s2 = ~s1
        if np.any(s2):
            out[s2, 1:] = das[1].inverse(states[s2, 1:])
        return surface.normalize(out)

    def inverse(states):
        states = np.array(np.atleast_2d(states), dtype=float, copy=True)
        n = disk_norm(states)
        move = (states[:, 0] == 1) & (n <= surface.outer_radius)
        if np.any(move):
            y = _psi(surface.disk_coords(states[move]))
            states[move] = surface.states_from_disk(2, y)
        out = states.copy()
        s2 = states[:, 0] == 2
        if np.any(s2):
            out[s2, 1:] = das[1].forward(states[s2, 1:])
        s1 = ~s2
        if np.any(s1):
            out[s1, 1:] = das[0].inverse(states[s1, 1:])
        return surface.normalize(out)

    return SmoothMap(f"genus2-{variant}", "glued", forward, inverse, None,
                     params={"variant": variant, "r": GENUS2_VARIANTS[variant],
                             "radius": radius,
                             "placement_scale": surface.placement_scale},
                     surface=surface, jet_order=1)


def genus2_charts() -> Genus2Charts:
    return Genus2Charts()


# ---------------------------------------------------------------------------
# perturbations

def _chart_offset(f: SmoothMap, pts, p):
    d = np.asarray(pts, dtype=float) - p
    return wrap(d) if f.domain == "torus" else d


def _check_perturbable(f: SmoothMap, p, radius: float):
    if f.domain == "glued":
        raise ValueError("perturbations act on torus or planar maps")
    if f.domain == "torus" and radius >= 0.25:
        raise ValueError("perturbation ball too close to the chart boundary")


def local_scaling_perturbation(f: SmoothMap, p, mu: float, s: float) -> SmoothMap:
    """g = f o f_mu with f_mu(x) = x + (mu - 1) rho(|x|) x in the chart at p,
    rho = 1 on [0, s/2] and 0 on [s, inf)."""
    p = np.asarray(p, dtype=float)
    _check_perturbable(f, p, s)

    def radial(r):
        return 1.0 + (mu - 1.0) * bumps.plateau(r, s / 2, s)

    # the radial profile r -> r * radial(r) must be increasing
    r = np.linspace(0.0, s, 4 * JACOBIAN_GRID)
    jr = jets.Jet.variable(r, 0, 1)
    prof = jr * radial(jr)
    if np.any(prof.coeffs[1, 0] <= 0) or np.any(radial(r) <= 0):
        raise ValueError(f"mu={mu} breaks invertibility of the scaling bump")

    def bump(pts):
        pts = np.asarray(pts, dtype=float)
        d = _chart_offset(f, pts, p)
        rr = np.hypot(d[..., 0], d[..., 1])
        inside = rr < s
        out = pts.copy()
        if np.any(inside):
            out[inside] = pts[inside] + (mu - 1.0) * bumps.plateau(rr[inside], s / 2, s)[..., None] * d[inside]
        return out

    def bump_inverse(pts):
        pts = np.asarray(pts, dtype=float)
        d = _chart_offset(f, pts, p)
        rr = np.hypot(d[..., 0], d[..., 1])
        target = rr[rr < s * max(1.0, mu)]
        inside = rr < s * max(1.0, mu)
        out = pts.copy()
        if np.any(inside):
            lo = np.zeros_like(target)
            hi = np.full_like(target, s)
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                val = mid * radial(mid)
                lo = np.where(val < target, mid, lo)
                hi = np.where(val < target, hi, mid)
            r0 = 0.5 * (lo + hi)
            # Newton polish
            for _ in range(3):
                jr = jets.Jet.variable(r0, 0, 1)
                pr = jr * radial(jr)
                r0 = r0 - (pr.value - target) / pr.coeffs[1, 0]
            scale = np.where(target > 0, r0 / np.where(target > 0, target, 1.0), 1.0 / mu)
            keep = r0 >= s
            scale = np.where(keep, 1.0, scale)
            out[inside] = pts[inside] - d[inside] + scale[:, None] * d[inside]
        return out

    def forward(pts):
        return f.forward(bump(pts))

    def inverse(pts):
        return bump_inverse(f.inverse(pts))

    formula = None
    if f.formula is not None:
        def formula(x, y):
            if f.domain == "torus":
                t = np.stack([np.asarray(jets.value_of(x)), np.asarray(jets.value_of(y))], -1)
                shift = np.floor(t - p + 0.5)
                dx, dy = x - (p[0] + shift[..., 0]), y - (p[1] + shift[..., 1])
            else:
                dx, dy = x - p[0], y - p[1]
            rv = np.hypot(np.asarray(jets.value_of(dx)), np.asarray(jets.value_of(dy)))
            rho = jets.where(rv < s, bumps.radial_plateau(dx, dy, s / 2, s), 0.0)
            return f.formula(x + (mu - 1.0) * rho * dx, y + (mu - 1.0) * rho * dy)

    return SmoothMap(f"{f.name}+scaling", f.domain, forward, inverse, formula,
                     params={"base": f.name, "p": p.tolist(), "mu": mu, "s": s},
                     surface=f.surface, jet_order=f.jet_order)


def scaling_bump(p, mu: float, s: float, domain: str = "plane") -> SmoothMap:
    """The bump map f_mu on its own (composed with the identity)."""
    ident = identity_map(domain)
    return local_scaling_perturbation(ident, p, mu, s)


def identity_map(domain: str = "plane") -> SmoothMap:
    def fwd(t):
        t = np.asarray(t, dtype=float)
        return np.mod(t, 1.0) if domain == "torus" else t.copy()

    return SmoothMap("identity", domain, fwd, fwd, lambda x, y: (x, y))


def tangency_flattening_perturbation(f: SmoothMap, p, g_s, g_u, mu: float,
                                     r: int, tol: float = 1e-7) -> SmoothMap:
    """f_mu = f o phi o j_mu o phi^-1 on the mu-ball at p, f elsewhere.

    ``phi`` is the translation chart at p; ``g_s`` and ``g_u`` are
    :class:`~nexpansive.manifolds.CurveGraph` objects in that chart, and
    j_mu(x, y) = (x, y + sigma(|(x, y)| / mu) (g_s(x) - g_u(x))).
    """
    from .tangency import taylor_at, tangency_order

    p = np.asarray(p, dtype=float)
    _check_perturbable(f, p, mu)
    for g in (g_s, g_u):
        if abs(float(g(0.0))) > tol:
            raise ValueError("curves must pass through the chart origin")
        if not (g.x_lo < -mu and g.x_hi > mu):
            raise ValueError("mu is larger than the chart radius covered by the curves")
    rep = tangency_order(taylor_at(g_s, 0.0, r), taylor_at(g_u, 0.0, r), tol)
    if not rep.is_r_tangency:
        raise ValueError(f"no {r}-tangency at p (contact order {rep.order})")

    def R_val(x):
        return g_s(x) - g_u(x)

    def R_jet(xj):
        if not jets.is_jet(xj):
            return R_val(xj)
        ds = g_s.derivatives(xj.value, xj.order)
        du = g_u.derivatives(xj.value, xj.order)
        return jets.compose(xj, [a - b for a, b in zip(ds, du)])

    def local(dx, dy):
        rv = np.hypot(np.asarray(jets.value_of(dx)), np.asarray(jets.value_of(dy)))
        sig = jets.where(rv < mu, bumps.radial_plateau(dx / mu, dy / mu, 0.5, 1.0), 0.0)
        xs = jets.substitute(dx, rv >= mu, 0.0)
        return dx, dy + sig * R_jet(xs)

    # vertical monotonicity of j_mu, needed for invertibility
    g = np.linspace(-mu, mu, JACOBIAN_GRID)
    X, Y = np.meshgrid(g, g)
    _, jy = local(jets.Jet.variable(X, 0, 1) + 0 * Y, jets.Jet.variable(Y, 1, 1) + 0 * X)
    if np.any(jy.coeffs[0, 1] <= 0):
        raise ValueError("flattening bump is not invertible at this mu")

    def forward(pts):
        pts = np.asarray(pts, dtype=float)
        d = _chart_offset(f, pts, p)
        inside = np.hypot(d[..., 0], d[..., 1]) < mu
        moved = pts.copy()
        if np.any(inside):
            _, ny = local(d[inside, 0], d[inside, 1])
            moved[inside, 1] = pts[inside, 1] + (ny - d[inside, 1])
        return f.forward(moved)

    def inverse(pts):
        q = f.inverse(np.asarray(pts, dtype=float))
        d = _chart_offset(f, q, p)
        inside = np.hypot(d[..., 0], d[..., 1]) < mu
        out = q.copy()
        if np.any(inside):
            x, target = d[inside, 0], d[inside, 1]
            half = np.sqrt(np.maximum(mu * mu - x * x, 0.0))
            lo, hi = -half - abs(float(np.max(np.abs(R_val(x))))) - 1e-12, half + abs(float(np.max(np.abs(R_val(x))))) + 1e-12
            lo = np.full_like(x, lo)
            hi = np.full_like(x, hi)
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                _, val = local(x, mid)
                lo = np.where(val < target, mid, lo)
                hi = np.where(val < target, hi, mid)
            y = 0.5 * (lo + hi)
            out[inside, 1] = q[inside, 1] + (y - target)
        return out

    formula = None
    if f.formula is not None:
        def formula(x, y):
            if f.domain == "torus":
                t = np.stack([np.asarray(jets.value_of(x)), np.asarray(jets.value_of(y))], -1)
                shift = np.floor(t - p + 0.5)
                dx, dy = x - (p[0] + shift[..., 0]), y - (p[1] + shift[..., 1])
            else:
                dx, dy = x - p[0], y - p[1]
            _, ny = local(dx, dy)
            return f.formula(x, y + (ny - dy))

    return SmoothMap(f"{f.name}+flattening", f.domain, forward, inverse, formula,
                     params={"base": f.name, "p": p.tolist(), "mu": mu, "r": r},
                     surface=f.surface, jet_order=f.jet_order)


def flattening_shift(x, y, g_s, g_u):
    """h(x, y) = (x, g_s(x) - g_u(x) + y)."""
    x = np.asarray(x, dtype=float)
    return x, g_s(x) - g_u(x) + np.asarray(y, dtype=float)


# ---------------------------------------------------------------------------
# planar model with an r-tangency at a wandering point

def tangency_model_map(r: int, p=(8.0, 8.0), bend: tuple = (0.1, 0.3),
                       twist: tuple = (1.0, 2.0)) -> SmoothMap:
    """f = L o T o B on the plane with L(x, y) = (2x, y/2).

    In the chart centred at ``p``: B(x, y) = (x, y - beta(|.|) x^(r+1)) bends
    and T rotates by a quarter turn near p (a twist fading out at
    ``twist[1]``).  The local unstable curve of p is the horizontal line and
    the local stable curve is y = x^(r+1), so p carries an r-tangency.
    """
    p = np.asarray(p, dtype=float)
    b_in, b_out = bend
    t_in, t_out = twist
    L = np.array([2.0, 0.5])

    def bend_fwd(x, y):
        beta = bumps.radial_plateau(x, y, b_in, b_out)
        return x, y - beta * x ** (r + 1)

    def twist_angle(x, y):
        return (np.pi / 2) * bumps.radial_plateau(x, y, t_in, t_out)

    def twist_fwd(x, y, sign=1.0):
        th = sign * twist_angle(x, y)
        c, s = jets.cos(th), jets.sin(th)
        return c * x - s * y, s * x + c * y

    def formula(x, y):
        dx, dy = x - p[0], y - p[1]
        bx, by = bend_fwd(dx, dy)
        tx, ty = twist_fwd(bx, by)
        return L[0] * (tx + p[0]), L[1] * (ty + p[1])

    def forward(pts):
        pts = np.asarray(pts, dtype=float)
        u, v = formula(pts[..., 0], pts[..., 1])
        return np.stack([u, v], -1)

    def inverse(pts):
        pts = np.asarray(pts, dtype=float)
        tx = pts[..., 0] / L[0] - p[0]
        ty = pts[..., 1] / L[1] - p[1]
        # the twist preserves radii, so its inverse rotates back by the same angle
        bx, by = twist_fwd(tx, ty, sign=-1.0)
        # undo the bend: solve y - beta(x, y) x^(r+1) = by for y
        y = by.copy()
        for _ in range(60):
            jy = jets.Jet.variable(y, 1, 1) + 0 * bx
            _, val = bend_fwd(jets.Jet.constant(bx, 1) + 0 * jy, jy)
            y = y - (val.value - by) / val.coeffs[0, 1]
        return np.stack([bx + p[0], y + p[1]], -1)

    return SmoothMap(f"tangency-model-r{r}", "plane", forward, inverse, formula,
                     params={"r": r, "p": p.tolist(), "bend": list(bend),
                             "twist": list(twist)})


# ---------------------------------------------------------------------------
# periodic orbits

@dataclass
class PeriodicOrbitInfo:
    point: np.ndarray
    period: int
    multipliers: list[complex]
    eigenvectors: np.ndarray
    kind: str
    hyperbolic: bool
    contraction_rate: float
    constant: float
    derivative: np.ndarray = field(repr=False)

    @property
    def is_saddle(self) -> bool:
        return self.kind == "saddle"

    def direction(self, side: str) -> np.ndarray:
        mods = np.abs(np.asarray(self.multipliers))
        k = int(np.argmin(mods) if side == "stable" else np.argmax(mods))
        v = np.real(self.eigenvectors[:, k])
        return v / np.linalg.norm(v)


def classify(mults, tol: float = HYPERBOLIC_TOL) -> tuple[str, bool]:
    mods = np.abs(np.asarray(mults))
    hyperbolic = bool(np.all(np.abs(mods - 1.0) > tol))
    if not hyperbolic:
        return "nonhyperbolic", False
    if np.all(mods < 1):
        return "sink", True
    if np.all(mods > 1):
        return "source", True
    return "saddle", True


def multipliers(f: SmoothMap, p, period: int = 1, tol: float = 1e-8) -> PeriodicOrbitInfo:
    """Eigenvalues of the derivative of f^period along the orbit of p."""
    if period < 1:
        raise ValueError("period must be positive")
    p = np.asarray(p, dtype=float)
    orbit = [p]
    for _ in range(period):
        orbit.append(f(orbit[-1][None])[0])
    if float(f.distance(orbit[-1], p)) > tol:
        raise ValueError(f"point is not periodic with period {period}")
    D = np.eye(2)
    for q in orbit[:-1]:
        D = f.jacobian(q) @ D
    w, v = np.linalg.eig(D)
    order = np.argsort(-np.abs(w))
    w, v = w[order], v[:, order]
    kind, hyp = classify(w)
    mods = np.abs(w)
    if hyp and kind == "saddle":
        lam = max(mods.min(), 1.0 / mods.max()) ** (1.0 / period)
    elif hyp:
        lam = (mods.min() if kind == "sink" else 1.0 / mods.max()) ** (1.0 / period)
    else:
        lam = 1.0
    c = _hyperbolicity_constant(f, orbit[:-1], v, w, lam, period)
    return PeriodicOrbitInfo(p, period, [complex(z) for z in w], v, kind, hyp,
                             float(lam), c, D)


def _hyperbolicity_constant(f, orbit, vecs, vals, lam, period, steps: int = 20) -> float:
    """Smallest c with |Df^n v| <= c lam^n |v| on the sampled eigendirections."""
    if not np.isreal(vals).all() or lam >= 1.0:
        return float("nan")
    jac = [f.jacobian(q) for q in orbit]
    c = 1.0
    for k in range(2):
        v = np.real(vecs[:, k])
        v = v / np.linalg.norm(v)
        contracting = abs(vals[k]) < 1
        cur = v.copy()
        for n in range(1, steps + 1):
            if contracting:
                cur = jac[(n - 1) % period] @ cur
            else:
                cur = np.linalg.solve(jac[(-n) % period], cur)
            c = max(c, np.linalg.norm(cur) / lam ** n)
    return float(c)


# ---------------------------------------------------------------------------
# C^r distance

def cr_norm_distance(f: SmoothMap, g: SmoothMap, order: int, grid) -> float:
    """Sup over ``grid`` (points array, or (center, half_width, n)) of all
    partial derivative differences of total order <= ``order``."""
    pts = sample_grid(grid)
    if f.domain != g.domain:
        raise ValueError("maps live on different domains")
    if f.formula is not None and g.formula is not None:
        fu, fv = f.jet(pts, order)
        gu, gv = g.jet(pts, order)
        worst = 0.0
        for a, b in ((fu, gu), (fv, gv)):
            for i in range(order + 1):
                for j in range(order + 1 - i):
                    d = a.partial(i, j) - b.partial(i, j)
                    if i + j == 0 and f.domain == "torus":
                        d = d - np.rint(d)
                    worst = max(worst, float(np.max(np.abs(d))))
        return worst
    return _fd_cr_distance(f, g, order, pts)


def _fd_cr_distance(f, g, order, pts, h: float = FD_STEP) -> float:
    from math import comb

    worst = float(np.max(f.distance(f(pts), g(pts))))
    for i in range(order + 1):
        for j in range(order + 1 - i):
            if i + j == 0:
                continue
            acc = 0.0
            for a in range(i + 1):
                for b in range(j + 1):
                    off = np.array([(i / 2 - a) * h, (j / 2 - b) * h])
                    w = (-1) ** (a + b) * comb(i, a) * comb(j, b)
                    acc = acc + w * f.displacement(f(pts + off), g(pts + off))
            worst = max(worst, float(np.max(np.abs(acc / h ** (i + j)))))
    return worst


def sample_grid(grid) -> np.ndarray:
    if isinstance(grid, dict):
        center, half, n = grid["center"], grid["half_width"], grid["n"]
    elif isinstance(grid, tuple) and len(grid) == 3 and np.ndim(grid[1]) == 0:
        center, half, n = grid
    else:
        return np.asarray(grid, dtype=float).reshape(-1, 2)
    c = np.asarray(center, dtype=float)
    g = np.linspace(-half, half, int(n))
    X, Y = np.meshgrid(g, g, indexing="ij")
    return np.stack([X.ravel() + c[0], Y.ravel() + c[1]], -1)


def describe(f: SmoothMap) -> dict[str, Any]:
    return {"name": f.name, "domain": f.domain, **f.params}
