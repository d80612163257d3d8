"""Finite-horizon expansivity experiments.

Every verdict here is a statement at a fixed (delta, T): a point set is
accepted when all of its iterates f^n, |n| <= T, have diameter at most
delta.  Points are float arrays in the map's native form (torus or plane
coordinates, or (sheet, tx, ty) states on the genus-two surface).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import SmoothMap
from .foliation import line_circle_intersections
from .manifolds import CurveGraph, ManifoldError, curve_points, _map_chart_points


@dataclass
class DynamicBall:
    center: np.ndarray
    delta: float
    horizon: int
    members: np.ndarray
    eps_sep: float
    accepted: int = 0

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class ExpansivityReport:
    delta: float
    horizon: int
    sampler: dict
    n_obs: int
    witnesses: list = field(default_factory=list)
    n_centers: int = 0
    level: str = "orbit"
    notes: str = ""

    @property
    def verdict(self) -> str:
        where = "for the leaf model" if self.level == "model" else "on sampled orbits"
        return (f"consistent with {self.n_obs}-expansive at horizon T={self.horizon}, "
                f"delta={self.delta} ({where}); not a proof of expansivity")

    def summary(self) -> dict:
        return {"delta": self.delta, "horizon": self.horizon, "n_obs": self.n_obs,
                "n_centers": self.n_centers, "level": self.level,
                "sampler": self.sampler, "verdict": self.verdict, "notes": self.notes}


@dataclass
class ArcDiameterTrace:
    arc: CurveGraph
    times: np.ndarray
    diameters: np.ndarray

    def at(self, n: int) -> float:
        return float(self.diameters[int(np.nonzero(self.times == n)[0][0])])

    def strictly_decreasing(self, n_max: int) -> tuple[bool, bool]:
        """(forward, backward) strict decrease of diam(f^n) for 1 <= |n| <= n_max."""
        fwd = [self.at(n) for n in range(0, n_max + 1)]
        bwd = [self.at(-n) for n in range(0, n_max + 1)]
        ok = lambda s: all(b < a for a, b in zip(s[1:-1], s[2:])) and s[1] <= s[0]
        return ok(fwd), ok(bwd)


# ---------------------------------------------------------------------------
# orbit distances

def orbit_distances(f: SmoothMap, x, ys, T: int) -> np.ndarray:
    """dist(f^n x, f^n y) for n = -T..T; shape (2T+1, len(ys))."""
    x = np.asarray(x, dtype=float)
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    ox = f.orbit(x[None], T, T)
    oy = f.orbit(ys, T, T)
    return np.stack([np.atleast_1d(f.distance(ox[i], oy[i])) for i in range(2 * T + 1)])


def cluster_diameters(f: SmoothMap, cluster, T: int) -> np.ndarray:
    """max pairwise distance of f^n(cluster) for n = -T..T."""
    cluster = np.atleast_2d(np.asarray(cluster, dtype=float))
    orb = f.orbit(cluster, T, T)
    m = len(cluster)
    out = np.zeros(2 * T + 1)
    for i in range(m):
        for j in range(i + 1, m):
            d = np.array([float(np.atleast_1d(f.distance(orb[n, i], orb[n, j]))[0])
                          for n in range(2 * T + 1)])
            out = np.maximum(out, d)
    return out


def _thin(points, dist_to_center, f, eps_sep):
    order = np.lexsort(tuple(points[:, k] for k in range(points.shape[1] - 1, -1, -1))
                       + (dist_to_center,))
    kept = []
    for i in order:
        p = points[i]
        if all(float(np.atleast_1d(f.distance(p, points[j]))[0]) >= eps_sep for j in kept):
            kept.append(i)
    return points[kept]


def dynamic_ball(f: SmoothMap, x, delta: float, T: int, candidates,
                 eps_sep: float | None = None) -> DynamicBall:
    """Candidates whose orbits stay delta-close to the orbit of x for
    |n| <= T, greedily thinned to eps_sep-separated representatives
    (closest to x first; ties broken lexicographically)."""
    if delta <= 0 or T < 1:
        raise ValueError("need delta > 0 and T >= 1")
    eps_sep = delta / 100 if eps_sep is None else eps_sep
    x = np.asarray(x, dtype=float)
    cand = np.atleast_2d(np.asarray(candidates, dtype=float)).reshape(-1, x.shape[-1])
    # time-zero prefilter (a member must start delta-close)
    d0 = np.atleast_1d(f.distance(cand, x)) if len(cand) else np.zeros(0)
    near = cand[d0 <= delta]
    if len(near):
        dist = orbit_distances(f, x, near, T)
        members = near[np.all(dist <= delta, axis=0)]
    else:
        members = near
    pts = np.concatenate([x[None], members])
    d_center = np.atleast_1d(f.distance(pts, x))
    thinned = _thin(pts, d_center, f, eps_sep)
    return DynamicBall(x, delta, T, thinned, eps_sep, accepted=len(members))


def dynamic_ball_bruteforce(f: SmoothMap, x, delta: float, T: int, candidates,
                            eps_sep: float | None = None) -> DynamicBall:
    """Reference implementation: no prefilter, every candidate iterated and
    compared at every time step."""
    eps_sep = delta / 100 if eps_sep is None else eps_sep
    x = np.asarray(x, dtype=float)
    cand = np.atleast_2d(np.asarray(candidates, dtype=float))
    keep = []
    for y in cand:
        ok = True
        a, b = x.copy(), y.copy()
        for step in (f.forward, f.inverse):
            a, b = x[None].copy(), y[None].copy()
            for n in range(T + 1):
                if float(np.atleast_1d(f.distance(a[0], b[0]))[0]) > delta:
                    ok = False
                    break
                a, b = step(a), step(b)
            if not ok:
                break
        if ok:
            keep.append(y)
    members = np.array(keep).reshape(-1, x.shape[-1])
    pts = np.concatenate([x[None], members])
    thinned = _thin(pts, np.atleast_1d(f.distance(pts, x)), f, eps_sep)
    return DynamicBall(x, delta, T, thinned, eps_sep, accepted=len(members))


def separation_time(f: SmoothMap, x, y, delta: float, T: int) -> int | None:
    """Smallest |n| <= T with dist(f^n x, f^n y) > delta (n > 0 wins ties)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.array_equal(x, y):
        return None
    d = orbit_distances(f, x, y[None], T)[:, 0]
    for k in range(T + 1):
        if d[T + k] > delta:
            return k
        if d[T - k] > delta:
            return -k
    return None


# ---------------------------------------------------------------------------
# samplers and the degree estimate

def grid_candidates(n: int, domain: str = "torus") -> np.ndarray:
    if domain != "torus":
        raise ValueError("grid sampler is defined on the torus")
    g = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(g, g, indexing="ij")
    return np.stack([X.ravel(), Y.ravel()], -1)


def expansivity_degree(f: SmoothMap, delta: float, T: int, sampler: dict,
                       eps_sep: float | None = None) -> ExpansivityReport:
    """Maximal observed dynamic-ball cardinality over the sampler's clusters.

    sampler kinds:
      ``{"kind": "grid", "n": 200, "centers": 100, "seed": 0}`` random
      centres against a uniform candidate grid (torus maps); an explicit
      ``center_points`` array replaces the random centres;
      ``{"kind": "clusters", "clusters": [...]}`` explicit point clusters,
      each accepted when its iterates stay delta-small.
    """
    kind = sampler.get("kind")
    if kind == "grid":
        rng = np.random.default_rng(sampler.get("seed", 0))
        cand = grid_candidates(int(sampler["n"]), f.domain)
        if "center_points" in sampler:
            centers = np.atleast_2d(np.asarray(sampler["center_points"], dtype=float))
        else:
            centers = rng.random((int(sampler["centers"]), 2))
        best, witnesses = 0, []
        for c in centers:
            ball = dynamic_ball(f, c, delta, T, cand, eps_sep)
            if ball.size > best:
                best, witnesses = ball.size, [ball.members]
            elif ball.size == best and len(witnesses) < 8:
                witnesses.append(ball.members)
        spec = {k: v for k, v in sampler.items() if k != "center_points"}
        return ExpansivityReport(delta, T, spec, best, witnesses, len(centers))
    if kind == "clusters":
        clusters = sampler["clusters"]
        best, witnesses = 1, []
        for cl in clusters:
            cl = np.atleast_2d(np.asarray(cl, dtype=float))
            if np.max(cluster_diameters(f, cl, T)) <= delta:
                size = len(cl)
                if size > best:
                    best, witnesses = size, [cl]
                elif size == best:
                    witnesses.append(cl)
        spec = {k: v for k, v in sampler.items() if k != "clusters"}
        spec["n_clusters"] = len(clusters)
        return ExpansivityReport(delta, T, spec, best, witnesses, len(clusters))
    raise ValueError(f"unknown sampler kind {kind!r}")


def model_expansivity_degree(census, delta: float = float("nan"), T: int = 0) -> ExpansivityReport:
    """Degree read off a leaf-model census: the largest number of points a
    stable line shares with one unstable leaf."""
    return ExpansivityReport(delta, T, {"kind": "census", "family": census.family.kind},
                             census.max_count, [census.attaining[:1]], level="model",
                             notes="the modified gluing realising this leaf model is not built")


# ---------------------------------------------------------------------------
# genus-two tangency witnesses

@dataclass
class TangencyWitness:
    circle: float        # unstable leaf: image of y = circle in Disk2
    height: float        # stable leaf y = height in Disk1
    disk_points: np.ndarray
    states: np.ndarray


def tangency_pairs(circles, offsets, eps_sep: float):
    """Candidate pairs: the two points where the stable line just below the
    top of each circle meets it, separated by at least eps_sep."""
    for c in circles:
        for off in offsets:
            half = max(off, eps_sep / 2)
            top = 1.0 / c
            # line y = h meets the circle at x = +-sqrt(h/c - h^2)
            h = (top + math.copysign(math.sqrt(max(0.0, top * top - 4 * half * half)), top)) / 2
            pts = line_circle_intersections(h, c)
            if len(pts) == 2 and pts[1, 0] - pts[0, 0] >= eps_sep:
                yield c, h, pts


def find_tangency_witness(f: SmoothMap, delta: float, T: int,
                          circles=None, offsets=None) -> TangencyWitness:
    """First pair (in a fixed search order) that never separates by more
    than delta within the horizon."""
    S = f.surface
    eps_sep = delta / 100
    circles = np.round(np.linspace(0.8, 1.25, 46), 6) if circles is None else circles
    offsets = [eps_sep * m for m in (0.5, 0.55, 0.6, 0.7)] if offsets is None else offsets
    for c, h, pts in tangency_pairs(circles, offsets, eps_sep):
        states = S.normalize(S.states_from_disk(1, pts))
        if separation_time(f, states[0], states[1], delta, T) is None:
            return TangencyWitness(float(c), float(h), pts, states)
    raise RuntimeError("no tangency witness found in the search range")


def neighbour_clusters(f: SmoothMap, witness: TangencyWitness, n: int, delta: float,
                       seed: int = 0) -> list[np.ndarray]:
    """3-point clusters near the tangency: the witness pair plus a point on
    the same stable line where it meets a neighbouring circle, or a nearby
    point off both leaves."""
    S = f.surface
    rng = np.random.default_rng(seed)
    eps_sep = delta / 100
    out = []
    while len(out) < n:
        kind = len(out) % 2
        if kind == 0:
            dc = rng.uniform(-1, 1) * 0.02 * abs(witness.circle)
            pts = line_circle_intersections(witness.height, witness.circle + dc)
            if len(pts) == 0:
                continue
            third = pts[rng.integers(len(pts))]
        else:
            r = rng.uniform(eps_sep, delta / 2)
            th = rng.uniform(0, 2 * np.pi)
            third = witness.disk_points[rng.integers(2)] + r * np.array([np.cos(th), np.sin(th)])
        if np.min(np.linalg.norm(witness.disk_points - third, axis=-1)) < eps_sep:
            continue
        pts = np.concatenate([witness.disk_points, third[None]])
        out.append(S.normalize(S.states_from_disk(1, pts)))
    return out


# ---------------------------------------------------------------------------
# arcs and recurrence

def arc_diameter_trace(f: SmoothMap, arc: CurveGraph, T: int, samples: int = 257) -> ArcDiameterTrace:
    xs = np.linspace(arc.x_lo, arc.x_hi, samples)
    pts = arc.points(xs)
    if f.domain == "glued":
        S = f.surface
        pts = S.normalize(S.states_from_disk(int(arc.chart[-1]), pts))
    times = np.arange(-T, T + 1)
    diam = np.zeros(len(times))
    orb = f.orbit(pts, T, T)
    for i in range(len(times)):
        o = orb[i]
        if not np.all(np.isfinite(o)):
            raise ManifoldError(f"arc leaves the domain at n={times[i]}")
        diam[i] = _diameter(f, o)
    return ArcDiameterTrace(arc, times, diam)


def _diameter(f: SmoothMap, pts) -> float:
    if f.domain == "plane":
        from .manifolds import diameter

        return diameter(pts)
    best = 0.0
    for i in range(len(pts)):
        best = max(best, float(np.max(f.distance(pts[i][None], pts[i:]))))
    return best


def nonwandering_classifier(f: SmoothMap, samples, eps: float, T: int,
                            ball_points: int = 400, seed: int = 0) -> list[str]:
    """Tag each sample 'recurrent-like' if a sampled eps-ball around it has
    an image f^n(ball), 1 <= n <= T, that re-enters the ball."""
    rng = np.random.default_rng(seed)
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    tags = []
    for x in samples:
        if f.domain == "glued":
            S = f.surface
            base = S.disk_coords(x[None])[0]
            sheet = int(x[0])
            r = eps * np.sqrt(rng.random(ball_points))
            th = 2 * np.pi * rng.random(ball_points)
            disk = base + np.stack([r * np.cos(th), r * np.sin(th)], -1)
            ball = S.normalize(S.states_from_disk(sheet, disk))
        else:
            r = eps * np.sqrt(rng.random(ball_points))
            th = 2 * np.pi * rng.random(ball_points)
            ball = x + np.stack([r * np.cos(th), r * np.sin(th)], -1)
            if f.domain == "torus":
                ball = np.mod(ball, 1.0)
        ball = np.concatenate([x[None], ball])
        cur = ball
        tag = "wandering"
        for _ in range(T):
            cur = f.forward(cur)
            if np.any(np.atleast_1d(f.distance(cur, x)) < eps):
                tag = "recurrent-like"
                break
        tags.append(tag)
    return tags
