"""Scenario files: YAML with a strict schema.

A scenario names one map and one experiment::

    name: cubic-census
    seed: 0
    map:
      name: genus2
      variant: cubic
    experiment:
      kind: census
      family: cubic
      a_step: 0.01

Unknown keys, missing required keys and out-of-range values are rejected
before anything runs; the resolved configuration (with every default
filled in) is embedded in each report.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

REQUIRED = object()


class ScenarioError(ValueError):
    """Validation failure; the CLI maps it to exit code 2."""


def _num(v, key):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{key}: expected a number, got {v!r}")
    return float(v)


def _int(v, key):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioError(f"{key}: expected an integer, got {v!r}")
    return v


def _str(v, key):
    if not isinstance(v, str):
        raise ScenarioError(f"{key}: expected a string, got {v!r}")
    return v


def _bool(v, key):
    if not isinstance(v, bool):
        raise ScenarioError(f"{key}: expected true or false, got {v!r}")
    return v


def _point(v, key):
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ScenarioError(f"{key}: expected a pair of numbers")
    return [_num(x, key) for x in v]


def _numlist(v, key):
    if not isinstance(v, (list, tuple)) or not v:
        raise ScenarioError(f"{key}: expected a nonempty list of numbers")
    return [_num(x, key) for x in v]


def _matrix(v, key):
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or any(not isinstance(r, (list, tuple)) or len(r) != 2 for r in v)):
        raise ScenarioError(f"{key}: expected a 2x2 matrix")
    return [[_int(x, key) for x in r] for r in v]


def _opt(check):
    def inner(v, key):
        return None if v is None else check(v, key)
    return inner


def _positive(check):
    def inner(v, key):
        v = check(v, key)
        if v <= 0:
            raise ScenarioError(f"{key}: must be positive")
        return v
    return inner


def _choice(*options):
    def inner(v, key):
        v = _str(v, key)
        if v not in options:
            raise ScenarioError(f"{key}: must be one of {', '.join(options)}")
        return v
    return inner


MAP_SCHEMAS = {
    "linear": {"matrix": ([[2, 1], [1, 1]], _matrix)},
    "da": {"source": ([0.0, 0.0], _point), "radius": (0.2, _positive(_num)),
           "strength": (1.0, _num), "matrix": ([[2, 1], [1, 1]], _matrix)},
    "genus2": {"variant": ("quadratic", _choice("quadratic", "cubic", "quartic"))},
    "tangency-model": {"r": (REQUIRED, _positive(_int)), "p": ([8.0, 8.0], _point)},
}

SAMPLER_SCHEMAS = {
    "grid": {"n": (200, _positive(_int)), "centers": (100, _positive(_int))},
    "tangency": {"clusters": (200, _positive(_int))},
    "census": {"a_step": (0.01, _positive(_num))},
}

EXPERIMENT_SCHEMAS = {
    "census": {"family": (REQUIRED, _choice("cubic", "quartic", "inversion-circles", "general")),
               "r": (None, _opt(_positive(_int))), "a_step": (0.01, _positive(_num)),
               "lines": (None, _opt(_numlist)), "tol": (1e-7, _positive(_num))},
    "expansivity": {"delta": (REQUIRED, _positive(_num)), "horizon": (REQUIRED, _positive(_int)),
                    "eps_sep": (None, _opt(_positive(_num))), "sampler": (REQUIRED, None)},
    "perturbation": {"perturbation": (REQUIRED, _choice("scaling", "flattening")),
                     "p": ([0.0, 0.0], _point), "mu": (REQUIRED, _numlist),
                     "s": (0.1, _positive(_num)), "order": (2, _positive(_int)),
                     "r": (2, _positive(_int)), "grid_half_width": (0.25, _positive(_num)),
                     "grid_n": (121, _positive(_int)), "arc_steps": (8, _positive(_int))},
    "manifolds": {"point": (REQUIRED, _point), "period": (1, _positive(_int)),
                  "delta": (REQUIRED, _positive(_num)), "order": (4, _positive(_int)),
                  "horizon": (50, _positive(_int)),
                  "side": ("both", _choice("stable", "unstable", "both"))},
    "trace": {"horizon": (REQUIRED, _positive(_int)), "coeffs": ([0.0], _numlist),
              "x_lo": (REQUIRED, _num), "x_hi": (REQUIRED, _num),
              "origin": ([0.0, 0.0], _point), "samples": (257, _positive(_int)),
              "flatten_mu": (None, _opt(_positive(_num)))},
}

OUTPUT_SCHEMA = {"csv": (True, _bool), "report": (True, _bool), "svg": (False, _bool)}


def _apply(schema: dict, data: Any, where: str) -> dict:
    if not isinstance(data, dict):
        raise ScenarioError(f"{where}: expected a mapping")
    unknown = sorted(set(data) - set(schema))
    if unknown:
        raise ScenarioError(f"{where}: unknown key {unknown[0]!r}")
    out = {}
    for key, (default, check) in schema.items():
        full = f"{where}.{key}" if where else key
        if key not in data:
            if default is REQUIRED:
                raise ScenarioError(f"missing required key {full!r}")
            out[key] = copy.deepcopy(default)
        else:
            out[key] = data[key] if check is None else check(data[key], full)
    return out


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    map: dict
    experiment: dict
    output: dict

    def resolved(self) -> dict:
        return {"name": self.name, "seed": self.seed, "map": copy.deepcopy(self.map),
                "experiment": copy.deepcopy(self.experiment),
                "output": copy.deepcopy(self.output)}


def validate(data: Any) -> Scenario:
    top = _apply({"name": ("scenario", _str), "seed": (0, _int),
                  "map": (REQUIRED, None), "experiment": (REQUIRED, None),
                  "output": ({}, None)}, data, "")
    m = top["map"]
    if not isinstance(m, dict) or "name" not in m:
        raise ScenarioError("missing required key 'map.name'")
    mname = _choice(*MAP_SCHEMAS)(m["name"], "map.name")
    mp = _apply(MAP_SCHEMAS[mname], {k: v for k, v in m.items() if k != "name"}, "map")
    mp = {"name": mname, **mp}
    e = top["experiment"]
    if not isinstance(e, dict) or "kind" not in e:
        raise ScenarioError("missing required key 'experiment.kind'")
    kind = _choice(*EXPERIMENT_SCHEMAS)(e["kind"], "experiment.kind")
    ex = _apply(EXPERIMENT_SCHEMAS[kind], {k: v for k, v in e.items() if k != "kind"}, "experiment")
    ex = {"kind": kind, **ex}
    if kind == "expansivity":
        s = ex["sampler"]
        if not isinstance(s, dict) or "kind" not in s:
            raise ScenarioError("missing required key 'experiment.sampler.kind'")
        skind = _choice(*SAMPLER_SCHEMAS)(s["kind"], "experiment.sampler.kind")
        ex["sampler"] = {"kind": skind, **_apply(SAMPLER_SCHEMAS[skind],
                                                 {k: v for k, v in s.items() if k != "kind"},
                                                 "experiment.sampler")}
    _cross_checks(mp, ex)
    out = _apply(OUTPUT_SCHEMA, top["output"] or {}, "output")
    return Scenario(top["name"], top["seed"], mp, ex, out)


def _cross_checks(mp: dict, ex: dict) -> None:
    kind = ex["kind"]
    if kind == "census" and ex["family"] == "general" and (ex["r"] is None or ex["r"] < 2):
        raise ScenarioError("experiment.r: the general family needs r >= 2")
    if kind == "trace" and not ex["x_lo"] < ex["x_hi"]:
        raise ScenarioError("experiment.x_lo must be smaller than experiment.x_hi")
    if kind == "perturbation":
        if ex["perturbation"] == "flattening" and mp["name"] != "tangency-model":
            raise ScenarioError("flattening perturbations need map.name: tangency-model")
        if ex["perturbation"] == "scaling" and mp["name"] not in ("linear", "da"):
            raise ScenarioError("scaling perturbations need a torus map")
        if any(m <= 0 for m in ex["mu"]):
            raise ScenarioError("experiment.mu: values must be positive")
    if kind == "expansivity":
        skind = ex["sampler"]["kind"]
        if skind == "grid" and mp["name"] not in ("linear", "da"):
            raise ScenarioError("the grid sampler needs a torus map")
        if skind in ("tangency", "census") and mp["name"] != "genus2":
            raise ScenarioError(f"the {skind} sampler needs map.name: genus2")
    if kind == "manifolds" and mp["name"] == "genus2":
        raise ScenarioError("manifolds experiments run on torus or planar maps")
    if mp["name"] == "da" and not 0 < mp["radius"] < 0.25:
        raise ScenarioError("map.radius: must lie in (0, 1/4)")


def load(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"scenario is not valid YAML: {exc}") from exc
    return validate(data)


def build_map(spec: dict):
    from . import dynamics

    name = spec["name"]
    if name == "linear":
        return dynamics.linear_toral_map(spec["matrix"])
    if name == "da":
        return dynamics.da_map(spec["source"], spec["radius"], spec["strength"], spec["matrix"])
    if name == "genus2":
        return dynamics.genus2_map(spec["variant"])
    if name == "tangency-model":
        return dynamics.tangency_model_map(spec["r"], spec["p"])
    raise ScenarioError(f"unknown map {name!r}")


def map_to_spec(f) -> dict:
    """Scenario ``map`` section reproducing a constructed map."""
    p = f.params
    if f.name == "linear":
        return {"name": "linear", "matrix": p["matrix"]}
    if f.name == "da":
        return {"name": "da", "source": p["source"], "radius": p["radius"],
                "strength": p["strength"], "matrix": p["matrix"]}
    if f.name.startswith("genus2-"):
        return {"name": "genus2", "variant": p["variant"]}
    if f.name.startswith("tangency-model"):
        return {"name": "tangency-model", "r": p["r"], "p": p["p"]}
    raise ValueError(f"map {f.name!r} has no scenario form")


def dump(data: dict) -> str:
    return yaml.safe_dump(data, sort_keys=True, default_flow_style=False)
