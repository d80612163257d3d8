"""The acceptance suite, shared by ``nexpansive all-acceptance`` and pytest.

Each check returns a :class:`CriterionResult`; ``run_all`` runs them in
order.  Tolerances are fixed here and nowhere else.
"""
from __future__ import annotations

import filecmp
import math
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import dynamics as D
from .expansivity import (arc_diameter_trace, cluster_diameters, expansivity_degree,
                          find_tangency_witness, neighbour_clusters, separation_time)
from .foliation import census, circle_curvature_gap, family
from .manifolds import CurveGraph
from .surface import _psi, inversion
from .tangency import count_roots, count_roots_scan, real_roots, rolle_chain


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.name}: {self.detail}"


def _annulus(rng, n):
    r = np.sqrt(rng.uniform(0.25, 4.0, n))
    th = rng.uniform(0, 2 * np.pi, n)
    return np.stack([r * np.cos(th), r * np.sin(th)], -1)


# ---------------------------------------------------------------------------

def criterion_1(seed: int = 0) -> CriterionResult:
    x = _annulus(np.random.default_rng(seed), 10_000)
    err = float(np.max(np.abs(inversion(inversion(x)) - x)))
    return CriterionResult(1, "inversion involution", err <= 1e-12,
                           f"max |psi(psi(x)) - x| = {err:.2e} on 10^4 points (tol 1e-12)")


def criterion_2(seed: int = 0) -> CriterionResult:
    ch = D.genus2_charts()
    x = _annulus(np.random.default_rng(seed), 1000)
    err = float(np.max(np.abs(_psi(ch.disk1(x)) - ch.disk2(_psi(x)))))
    # the same identity through the map on the glued surface
    f = D.genus2_map("quadratic")
    S = f.surface
    st = S.normalize(S.states_from_disk(2, _psi(x)))
    map_err = float(np.max(np.abs(S.disk_coords(f(st)) - ch.disk1(x))))
    ok = err <= 1e-12 and map_err <= 1e-9
    return CriterionResult(2, "seam consistency", ok,
                           f"chart expressions differ by {err:.2e} (tol 1e-12); "
                           f"map through the seam {map_err:.2e} (tol 1e-9)")


def criterion_3(seed: int = 0) -> CriterionResult:
    f = D.linear_toral_map()
    t = time.perf_counter()
    rep = expansivity_degree(f, 0.05, 25, {"kind": "grid", "n": 200, "centers": 100,
                                           "seed": seed})
    dt = time.perf_counter() - t
    return CriterionResult(3, "cat map expansivity", rep.n_obs == 1 and dt < 60,
                           f"N_obs = {rep.n_obs} over {rep.n_centers} centres, {dt:.1f} s (< 60 s)")


def _rolle_instance(rng):
    """Polynomial of degree <= 6 with at least r + 1 distinct rational roots in [-1, 1]."""
    deg = int(rng.integers(2, 7))
    k = int(rng.integers(2, deg + 1))          # number of planted roots
    r = int(rng.integers(1, k))                # r + 1 <= k
    roots = rng.choice(np.arange(-20, 21), size=k, replace=False)
    p = [Fraction(1)]
    for z in roots:
        p = _mul(p, [Fraction(-int(z), 20), Fraction(1)])
    for _ in range(deg - k):
        # a factor without roots in [-1, 1]
        p = _mul(p, [Fraction(int(rng.integers(25, 40)), 20), Fraction(int(rng.choice([-1, 1])))])
    scale = Fraction(int(rng.integers(1, 9)), 4) * int(rng.choice([-1, 1]))
    return [scale * c for c in p], r


def _mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _bounded_instance(rng):
    """Polynomial of degree <= 6 whose r-th derivative stays away from 0 on [-1, 1]."""
    while True:
        deg = int(rng.integers(1, 7))
        r = int(rng.integers(1, deg + 1))
        c = rng.integers(-8, 9, deg + 1).astype(float) / 4
        if c[-1] == 0:
            continue
        dr = np.polynomial.polynomial.polyder(c, r)
        xs = np.linspace(-1, 1, 2001)
        if np.min(np.abs(np.polynomial.polynomial.polyval(xs, dr))) >= 0.25:
            return c, r


def criterion_4(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    interval = (-1.0, 1.0)
    chain_fail = disagree = contra_fail = 0
    for _ in range(1000):
        p, r = _rolle_instance(rng)
        rep = rolle_chain(p, interval, r)
        chain_fail += not rep.passed
        n = count_roots(p, interval)
        disagree += n != count_roots_scan([float(c) for c in p], interval)
    for _ in range(1000):
        c, r = _bounded_instance(rng)
        n = count_roots(c, interval)
        contra_fail += n > r
        disagree += n != count_roots_scan(c, interval)
    ok = chain_fail == 0 and contra_fail == 0 and disagree == 0
    return CriterionResult(4, "Rolle chain", ok,
                           f"chain failures {chain_fail}/1000, bounded-derivative failures "
                           f"{contra_fail}/1000, oracle disagreements {disagree}/2000")


def criterion_5() -> CriterionResult:
    fam = family("cubic")
    C = census(fam)
    orders = {(a, x0): k for a, x0, c, k in C.tangencies}
    k_plus, k_minus = orders.get((1.0, 0.0)), orders.get((-1.0, 0.0))
    ok = (C.max_count == 3 and k_plus == 2 and k_minus == 2 and C.derivative_floor == 6.0
          and C.param_slope_min >= 1.0)
    return CriterionResult(5, "cubic census", ok,
                           f"max count {C.max_count}, contact order at a=+-1, x=0: "
                           f"{k_plus}/{k_minus}, min |p'''| = {C.derivative_floor:g}, "
                           f"min dp/da = {C.param_slope_min:g}")


def criterion_6() -> CriterionResult:
    fam = family("quartic")
    C = census(fam)
    attained = any(a == 0.01 for a, c in C.attaining)
    # intersections of p_0.01 with the stable line y = 0
    roots = np.sort(real_roots(fam.coeffs(0.01), (-2.0, 2.0)))
    target = np.array([-0.894, -0.447, 0.447, 0.894])
    err = float(np.max(np.abs(roots - target))) if len(roots) == 4 else math.inf
    ok = C.max_count == 4 and attained and err <= 1e-3
    return CriterionResult(6, "quartic census", ok,
                           f"max count {C.max_count}, attained at a = 0.01: {attained}, "
                           f"roots {np.round(roots, 4).tolist()} (tol 1e-3)")


def criterion_7() -> CriterionResult:
    C = census(family("inversion-circles"))
    orders = sorted({t[3] for t in C.tangencies})
    gaps = {c: circle_curvature_gap(c) for c in (0.5, 1.0, 2.0)}
    gap_err = max(abs(g - 2 * abs(c)) for c, g in gaps.items())
    ok = orders == [1] and gap_err <= 1e-6
    return CriterionResult(7, "inversion model tangencies", ok,
                           f"contact orders {orders}, {len(C.tangencies)} tangencies, "
                           f"curvature gap error {gap_err:.1e} (tol 1e-6)")


def criterion_8() -> CriterionResult:
    f = D.linear_toral_map()
    p = np.zeros(2)
    s = 0.1
    worst = 0.0
    identical = True
    rng = np.random.default_rng(0)
    far = rng.random((2000, 2))
    far = far[f.distance(far, p[None]) > s]
    for mu in (0.9, 0.99, 1.01):
        bump = D.scaling_bump(p, mu, s, "torus")
        worst = max(worst, float(np.max(np.abs(D.fd_jacobian(bump, p) - mu * np.eye(2)))))
        g = D.local_scaling_perturbation(f, p, mu, s)
        pre = f.inverse(far)              # points whose image lies outside the ball
        outside = pre[f.distance(pre, p[None]) > s]
        identical &= bool(np.array_equal(g(outside), f(outside)))
    ok = worst <= 1e-6 and identical
    return CriterionResult(8, "local scaling perturbation", ok,
                           f"max |d_p bump - mu I| = {worst:.1e} (tol 1e-6); outputs outside "
                           f"the ball bit-identical: {identical}")


def flattening_setup(r: int, mu: float):
    f = D.tangency_model_map(r)
    p = np.asarray(f.params["p"])
    g_s = CurveGraph.from_polynomial([0.0] * (r + 1) + [1.0], -0.5, 0.5, origin=p)
    g_u = CurveGraph.from_polynomial([0.0], -0.5, 0.5, origin=p)
    g = D.tangency_flattening_perturbation(f, p, g_s, g_u, mu, r)
    half = mu / math.sqrt(8) * (1 - 1e-9)
    arc = CurveGraph.from_polynomial([0.0], -half, half, origin=p)
    return f, g, p, arc


def criterion_9() -> CriterionResult:
    ok = True
    parts = []
    for r in (2, 3):
        dists = []
        arcs_ok = True
        for mu in (0.2, 0.1, 0.05):
            f, g, p, arc = flattening_setup(r, mu)
            fwd, bwd = arc_diameter_trace(g, arc, 8).strictly_decreasing(8)
            arcs_ok &= fwd and bwd
            dists.append(D.cr_norm_distance(f, g, r, (p, 0.25, 121)))
        mono = all(b < a for a, b in zip(dists, dists[1:]))
        ok &= arcs_ok and mono
        parts.append(f"r={r}: arcs decreasing {arcs_ok}, C^r distances "
                     + ", ".join(f"{d:.3g}" for d in dists))
    return CriterionResult(9, "tangency flattening", ok, "; ".join(parts))


def criterion_10(seed: int = 0) -> CriterionResult:
    f = D.genus2_map("quadratic")
    delta, T = 0.05, 20
    w = find_tangency_witness(f, delta, T)
    sep = separation_time(f, w.states[0], w.states[1], delta, T)
    clusters = neighbour_clusters(f, w, 200, delta, seed)
    violating = sum(float(np.max(cluster_diameters(f, c, T))) > delta for c in clusters)
    rep = expansivity_degree(f, delta, T, {"kind": "clusters",
                                           "clusters": [w.states] + clusters})
    ok = sep is None and violating == 200 and rep.n_obs == 2
    return CriterionResult(10, "genus-two 2-expansivity witness", ok,
                           f"pair separation time {sep}, violating clusters {violating}/200, "
                           f"N_obs = {rep.n_obs}")


DETERMINISM_SCENARIOS = {
    "cubic-census": {"name": "cubic-census", "seed": 0,
                     "map": {"name": "genus2", "variant": "cubic"},
                     "experiment": {"kind": "census", "family": "cubic", "a_step": 0.05},
                     "output": {"svg": True}},
    "catmap-expansivity": {"name": "catmap-expansivity", "seed": 3,
                           "map": {"name": "linear"},
                           "experiment": {"kind": "expansivity", "delta": 0.05, "horizon": 25,
                                          "sampler": {"kind": "grid", "n": 100, "centers": 16}}},
    "catmap-scaling": {"name": "catmap-scaling", "seed": 0, "map": {"name": "linear"},
                       "experiment": {"kind": "perturbation", "perturbation": "scaling",
                                      "mu": [0.9, 0.99, 1.01], "grid_n": 11}},
    "catmap-manifolds": {"name": "catmap-manifolds", "seed": 0, "map": {"name": "linear"},
                         "experiment": {"kind": "manifolds", "point": [0.0, 0.0],
                                        "delta": 0.1}},
}

COMMAND_OF = {"census": "census", "expansivity": "expansivity", "perturbation": "perturb",
              "manifolds": "manifolds", "trace": "trace"}


def criterion_11(out: Path | None = None) -> CriterionResult:
    import yaml

    from .cli import execute

    with tempfile.TemporaryDirectory() as tmp:
        base = Path(tmp)
        for name, sc in DETERMINISM_SCENARIOS.items():
            (base / f"{name}.yaml").write_text(yaml.safe_dump(sc, sort_keys=False))
        runs = []
        for i, threads in enumerate((1, 4, 1)):
            d = base / f"run{i}"
            for name, sc in DETERMINISM_SCENARIOS.items():
                execute(COMMAND_OF[sc["experiment"]["kind"]], base / f"{name}.yaml", d, threads)
            runs.append(d)
        names = sorted(p.name for p in runs[0].iterdir())
        same = all(sorted(p.name for p in d.iterdir()) == names for d in runs[1:])
        mismatch = [] if not same else [
            n for n in names for d in runs[1:] if not filecmp.cmp(runs[0] / n, d / n, shallow=False)]
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
            for n in names:
                (out / n).write_bytes((runs[0] / n).read_bytes())
    ok = same and not mismatch and len(names) > 0
    return CriterionResult(11, "determinism", ok,
                           f"{len(names)} artifacts over 3 runs (threads 1/4/1), "
                           f"mismatches {len(mismatch) if same else 'file sets differ'}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def run_all(out: Path | None = None, threads: int = 1) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        t = time.perf_counter()
        try:
            res = fn(out) if fn is criterion_11 else fn()
        except Exception as exc:  # a crash is a failure of that criterion
            res = CriterionResult(CRITERIA.index(fn) + 1, fn.__name__, False,
                                  f"raised {type(exc).__name__}: {exc}")
        res.seconds = time.perf_counter() - t
        results.append(res)
    return results
