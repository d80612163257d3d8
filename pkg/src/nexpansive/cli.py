"""Command line front end.

    nexpansive census --scenario scenarios/cubic-census.yaml --out out/

Exit codes: 0 success, 2 validation error, 3 runtime failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .scenario import ScenarioError, build_map, dump, load

log = logging.getLogger("nexpansive")

SUBCOMMANDS = ("build-map", "census", "expansivity", "perturb", "manifolds", "trace",
               "plot", "run", "all-acceptance")
KIND_OF = {"census": "census", "expansivity": "expansivity", "perturb": "perturbation",
           "manifolds": "manifolds", "trace": "trace"}

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 2, 3


class RunError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# output helpers

def fmt(v) -> str:
    return f"{float(v):.17g}"


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def parallel_map(fn, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _chunks(seq, n):
    seq = list(seq)
    n = max(1, min(n, len(seq)))
    size = -(-len(seq) // n)
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def _plain(obj):
    """Convert numpy scalars/arrays for YAML output."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(fmt(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex) and obj.imag == 0:
        return float(fmt(obj.real))
    if isinstance(obj, complex):
        return [float(fmt(obj.real)), float(fmt(obj.imag))]
    return obj


# ---------------------------------------------------------------------------
# experiments: each returns (results dict, {csv name: text}, figure or None)

def run_build_map(sc, f, threads):
    from .dynamics import JACOBIAN_GRID

    rng = np.random.default_rng(sc.seed)
    res = {"map": f.name, "domain": f.domain, "params": f.params}
    if f.domain == "glued":
        S = f.surface
        r = np.sqrt(rng.uniform(0.25, 4.0, 1000))
        th = rng.uniform(0, 2 * np.pi, 1000)
        x = np.stack([r * np.cos(th), r * np.sin(th)], -1)
        st = S.normalize(S.states_from_disk(1, x))
        res["inverse_error"] = float(np.max(S.distance(f.inverse(f(st)), st)))
    else:
        pts = rng.random((1000, 2))
        if f.domain == "plane":
            pts = np.asarray(f.params["p"]) + 4 * (pts - 0.5)
        res["inverse_error"] = float(np.max(f.distance(f.inverse(f(pts)), pts)))
    res["jacobian_grid"] = JACOBIAN_GRID
    return res, {}, None


def run_census(sc, f, threads):
    from .foliation import a_grid, census, family, merge_censuses

    ex = sc.experiment
    fam = family(ex["family"], ex["r"])
    if fam.kind == "inversion-circles":
        values = [c for c in a_grid(ex["a_step"] * 5, -2.0, 2.0) if abs(c) > 1e-12]
    else:
        values = a_grid(ex["a_step"])
    parts = parallel_map(lambda chunk: census(fam, ex["lines"], chunk, ex["tol"]),
                         _chunks(values, threads), threads)
    C = merge_censuses(parts)
    res = C.summary()
    res["tangencies_of_max_order"] = [list(t) for t in C.tangencies
                                      if t[3] == C.max_contact_order][:8]
    res["verdict"] = (f"max {C.max_count} distinct intersections of a stable line with one "
                      f"unstable leaf; largest contact order {C.max_contact_order}")
    if fam.experimental:
        res["verdict"] += " (experimental family beyond the explicit models)"
    table = csv_text(["a", "c", "count", "contact_order"], C.rows)
    from .svg import family_figure, inversion_figure

    fig = inversion_figure() if fam.kind == "inversion-circles" else (
        family_figure(fam.kind) if fam.kind in ("cubic", "quartic") else None)
    return res, {"census.csv": table}, fig


def run_expansivity(sc, f, threads):
    from .expansivity import (expansivity_degree, find_tangency_witness,
                              model_expansivity_degree, neighbour_clusters,
                              separation_time, cluster_diameters)

    ex = sc.experiment
    s = ex["sampler"]
    delta, T = ex["delta"], ex["horizon"]
    rows = []
    if s["kind"] == "grid":
        rng = np.random.default_rng(sc.seed)
        centers = rng.random((s["centers"], 2))

        def one(chunk):
            return expansivity_degree(f, delta, T, {"kind": "grid", "n": s["n"],
                                                    "center_points": chunk}, ex["eps_sep"])

        reps = parallel_map(one, _chunks(centers, threads), threads)
        n_obs = max(r.n_obs for r in reps)
        wit = [w for r in reps if r.n_obs == n_obs for w in r.witnesses][:8]
        from .expansivity import ExpansivityReport

        rep = ExpansivityReport(delta, T, dict(s), n_obs, wit, len(centers))
        for i, w in enumerate(wit):
            for j, p in enumerate(np.atleast_2d(w)):
                rows.append([i, j] + [float(v) for v in p])
        res = rep.summary()
    elif s["kind"] == "tangency":
        w = find_tangency_witness(f, delta, T)
        clusters = neighbour_clusters(f, w, s["clusters"], delta, sc.seed)
        rep = expansivity_degree(f, delta, T, {"kind": "clusters",
                                               "clusters": [w.states] + clusters}, ex["eps_sep"])
        rep.sampler = dict(s)
        violated = sum(float(np.max(cluster_diameters(f, c, T))) > delta for c in clusters)
        res = rep.summary()
        res["witness"] = {"circle": w.circle, "height": w.height,
                          "disk_points": w.disk_points.tolist(),
                          "separation_time": separation_time(f, w.states[0], w.states[1], delta, T)}
        res["three_point_clusters"] = {"sampled": len(clusters), "violating": int(violated)}
        if f.params["variant"] != "quadratic":
            res["notes"] = ("orbit experiments run on the quadratic gluing; the modified "
                            "gluing of this variant is modelled by its leaf family only")
        for j, p in enumerate(w.states):
            rows.append([0, j] + [float(v) for v in p])
    else:
        from .foliation import a_grid, census, family

        fam = family(f.params["variant"] if f.params["variant"] != "quadratic"
                     else "inversion-circles")
        C = census(fam, a_values=None if fam.kind == "inversion-circles" else a_grid(s["a_step"]))
        rep = model_expansivity_degree(C, delta, T)
        rep.sampler = dict(s)
        res = rep.summary()
        for j, (a, c) in enumerate(C.attaining[:1]):
            rows.append([0, j, a, c])
    header = ["cluster", "point"] + (["sheet", "tx", "ty"] if f.domain == "glued" and
                                     s["kind"] != "census" else ["x", "y"])
    return res, {"witnesses.csv": csv_text(header, rows)}, None


def run_perturbation(sc, f, threads):
    from . import dynamics as D
    from .expansivity import arc_diameter_trace
    from .manifolds import CurveGraph

    ex = sc.experiment
    rows, res = [], {"perturbation": ex["perturbation"], "runs": []}
    if ex["perturbation"] == "scaling":
        p = np.asarray(ex["p"])
        base = D.multipliers(f, p)
        grid = (p, ex["grid_half_width"], ex["grid_n"])
        for mu in ex["mu"]:
            g = D.local_scaling_perturbation(f, p, mu, ex["s"])
            bump = D.scaling_bump(p, mu, ex["s"], f.domain)
            err = float(np.max(np.abs(D.fd_jacobian(bump, p) - mu * np.eye(2))))
            m = D.multipliers(g, p)
            dist = D.cr_norm_distance(f, g, ex["order"], grid)
            mult_err = float(np.max(np.abs(np.array(m.multipliers)
                                           - mu * np.array(base.multipliers))))
            res["runs"].append({"mu": mu, "cr_distance": dist, "fd_derivative_error": err,
                                "multiplier_error": mult_err, "kind": m.kind})
            rows.append([mu, dist, err, mult_err, m.kind])
        header = ["mu", "cr_distance", "fd_derivative_error", "multiplier_error", "kind"]
    else:
        r = f.params["r"]
        p = np.asarray(f.params["p"])
        g_s = CurveGraph.from_polynomial([0.0] * (r + 1) + [1.0], -0.5, 0.5, origin=p)
        g_u = CurveGraph.from_polynomial([0.0], -0.5, 0.5, origin=p)
        grid = (p, ex["grid_half_width"], ex["grid_n"])
        for mu in ex["mu"]:
            g = D.tangency_flattening_perturbation(f, p, g_s, g_u, mu, r)
            dist = D.cr_norm_distance(f, g, r, grid)
            half = mu / np.sqrt(8) * (1 - 1e-9)
            arc = CurveGraph.from_polynomial([0.0], -half, half, origin=p)
            tr = arc_diameter_trace(g, arc, ex["arc_steps"])
            fwd, bwd = tr.strictly_decreasing(ex["arc_steps"])
            res["runs"].append({"mu": mu, "cr_distance": dist, "arc_forward_decreasing": fwd,
                                "arc_backward_decreasing": bwd})
            rows.append([mu, dist, int(fwd), int(bwd)])
        header = ["mu", "cr_distance", "arc_forward_decreasing", "arc_backward_decreasing"]
    # the distance should shrink as the perturbation approaches the identity
    key = (lambda m: abs(m - 1.0)) if ex["perturbation"] == "scaling" else (lambda m: m)
    runs = sorted(res["runs"], key=lambda run: -key(run["mu"]))
    res["cr_distance_monotone"] = all(
        v["cr_distance"] < u["cr_distance"] if key(v["mu"]) < key(u["mu"])
        else v["cr_distance"] <= u["cr_distance"] * (1 + 1e-12)
        for u, v in zip(runs, runs[1:]))
    return res, {"perturbation.csv": csv_text(header, rows)}, None


def run_manifolds(sc, f, threads):
    from . import dynamics as D
    from .manifolds import local_stable_curve, local_unstable_curve
    from .svg import Figure

    ex = sc.experiment
    info = D.multipliers(f, ex["point"], ex["period"])
    sides = ["stable", "unstable"] if ex["side"] == "both" else [ex["side"]]
    res = {"kind": info.kind, "multipliers": info.multipliers, "curves": {}}
    tables = {}
    fig = Figure(bounds=(-ex["delta"], ex["delta"], -ex["delta"], ex["delta"]), annulus=False,
                 title=f"local manifolds of {f.name} at {ex['point']}")
    for side in sides:
        fn = local_stable_curve if side == "stable" else local_unstable_curve
        lm = fn(f, info, ex["delta"], ex["order"], ex["horizon"])
        c = lm.curve
        slope = float(c.derivatives(0.0, 1)[1]) if c.x_lo <= 0 <= c.x_hi else float("nan")
        res["curves"][side] = {"membership": lm.membership, "slope_at_point": slope,
                               "x_range": [c.x_lo, c.x_hi], "samples": len(c.x)}
        rows = [[x, y] + list(j[1:]) for x, y, j in zip(c.x, c.y, c.jets)]
        tables[f"{side}.csv"] = csv_text(["x", "y"] + [f"jet_{k}" for k in range(1, c.order + 1)],
                                         rows)
        target = fig.stable if side == "stable" else fig.unstable
        target.append(np.stack([c.x, c.y], -1))
    return res, tables, fig


def run_trace(sc, f, threads):
    from . import dynamics as D
    from .expansivity import arc_diameter_trace
    from .manifolds import CurveGraph

    ex = sc.experiment
    g = f
    if ex["flatten_mu"] is not None:
        if not f.name.startswith("tangency-model"):
            raise ScenarioError("experiment.flatten_mu needs map.name: tangency-model")
        r = f.params["r"]
        p = np.asarray(f.params["p"])
        g_s = CurveGraph.from_polynomial([0.0] * (r + 1) + [1.0], -0.5, 0.5, origin=p)
        g_u = CurveGraph.from_polynomial([0.0], -0.5, 0.5, origin=p)
        g = D.tangency_flattening_perturbation(f, p, g_s, g_u, ex["flatten_mu"], r)
    chart = {"torus": "Torus1", "plane": "plane", "glued": "Disk1"}[f.domain]
    arc = CurveGraph.from_polynomial(ex["coeffs"], ex["x_lo"], ex["x_hi"], chart=chart,
                                     origin=ex["origin"])
    tr = arc_diameter_trace(g, arc, ex["horizon"], ex["samples"])
    res = {"diameter_at_0": float(tr.at(0)), "max_diameter": float(np.max(tr.diameters))}
    if ex["horizon"] >= 1:
        fwd, bwd = tr.strictly_decreasing(ex["horizon"])
        res["forward_decreasing"], res["backward_decreasing"] = fwd, bwd
    rows = [[int(n), float(d)] for n, d in zip(tr.times, tr.diameters)]
    return res, {"trace.csv": csv_text(["n", "diameter"], rows)}, None


RUNNERS = {"census": run_census, "expansivity": run_expansivity,
           "perturbation": run_perturbation, "manifolds": run_manifolds, "trace": run_trace}


# ---------------------------------------------------------------------------
# command dispatch

def execute(command: str, scenario_path, out_dir, threads: int | None = None,
            seed: int | None = None) -> dict:
    """Run one subcommand; raises ScenarioError / RunError."""
    sc = load(scenario_path)
    if seed is not None:
        from dataclasses import replace

        sc = replace(sc, seed=seed)
    threads = threads or os.cpu_count() or 1
    kind = sc.experiment["kind"]
    if command in KIND_OF and KIND_OF[command] != kind:
        raise ScenarioError(f"scenario experiment is {kind!r}; '{command}' needs "
                            f"kind: {KIND_OF[command]}")
    try:
        f = build_map(sc.map)
    except ValueError as exc:
        raise ScenarioError(f"map: {exc}") from exc
    out = Path(out_dir)
    if command == "build-map":
        res, tables, fig = run_build_map(sc, f, threads)
    else:
        res, tables, fig = RUNNERS[kind](sc, f, threads)
    if command == "plot":
        if fig is None or fig.empty:
            raise ScenarioError("this experiment produced no curve data to plot")
        from .svg import render

        atomic_write(out / f"{sc.name}.svg", render(fig))
        return res
    report = {"command": command, "scenario": sc.resolved(), "results": _plain(res),
              "version": __version__}
    if sc.output["report"]:
        atomic_write(out / f"{sc.name}.report.txt", dump(report))
    if sc.output["csv"]:
        for name, text in tables.items():
            atomic_write(out / f"{sc.name}.{name}", text)
    if sc.output["svg"] and fig is not None and not fig.empty:
        from .svg import render

        atomic_write(out / f"{sc.name}.svg", render(fig))
    return res


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nexpansive",
                                description="Finite-horizon expansivity experiments")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--scenario", required=name != "all-acceptance")
        sp.add_argument("--out", default="out")
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        if args.command == "all-acceptance":
            from .acceptance import run_all

            results = run_all(Path(args.out), threads=args.threads or 1)
            for r in results:
                print(r.line())
            return EXIT_OK if all(r.passed for r in results) else EXIT_RUNTIME
        res = execute(args.command, args.scenario, args.out, args.threads, args.seed)
        log.info("results: %s", _plain(res))
        return EXIT_OK
    except ScenarioError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # reported with diagnostics
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        if args.verbose:
            import traceback

            traceback.print_exc()
        return EXIT_RUNTIME


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
