from pathlib import Path

import pytest
import yaml

from nexpansive.cli import main
from nexpansive.scenario import ScenarioError, dump, load, map_to_spec, build_map, validate

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def _write(tmp_path, data, name="s.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(data))
    return p


BASE = {"name": "t", "map": {"name": "linear"},
        "experiment": {"kind": "expansivity", "delta": 0.05, "horizon": 5,
                       "sampler": {"kind": "grid", "n": 20, "centers": 3}}}


def test_defaults_are_materialized():
    sc = validate(BASE)
    assert sc.map["matrix"] == [[2, 1], [1, 1]]
    assert sc.experiment["eps_sep"] is None
    assert sc.output == {"csv": True, "report": True, "svg": False}
    assert sc.seed == 0


def test_unknown_key_rejected():
    bad = {**BASE, "experiment": {**BASE["experiment"], "dleta": 0.1}}
    with pytest.raises(ScenarioError, match="dleta"):
        validate(bad)


def test_missing_key_named():
    bad = {**BASE, "experiment": {k: v for k, v in BASE["experiment"].items() if k != "delta"}}
    with pytest.raises(ScenarioError, match="experiment.delta"):
        validate(bad)


def test_type_errors():
    with pytest.raises(ScenarioError):
        validate({**BASE, "seed": "zero"})
    with pytest.raises(ScenarioError):
        validate({**BASE, "map": {"name": "da", "radius": 0.4}})
    with pytest.raises(ScenarioError):
        validate({**BASE, "map": {"name": "genus2"}})


def test_map_spec_roundtrip():
    for spec in ({"name": "linear", "matrix": [[2, 1], [1, 1]]},
                 {"name": "genus2", "variant": "cubic"},
                 {"name": "tangency-model", "r": 3, "p": [8.0, 8.0]}):
        assert map_to_spec(build_map(spec)) == spec


def test_all_shipped_scenarios_validate():
    files = sorted(SCENARIOS.glob("*.yaml"))
    assert files
    for p in files:
        if p.name.startswith("bad-"):
            with pytest.raises(ScenarioError):
                load(p)
        else:
            load(p)


def test_cli_expansivity_writes_report(tmp_path):
    p = _write(tmp_path, BASE)
    assert main(["expansivity", "--scenario", str(p), "--out", str(tmp_path / "o")]) == 0
    rep = yaml.safe_load((tmp_path / "o" / "t.report.txt").read_text())
    assert rep["results"]["n_obs"] == 1
    assert rep["scenario"]["experiment"]["sampler"]["n"] == 20
    assert (tmp_path / "o" / "t.witnesses.csv").exists()


def test_cli_missing_delta_exit_2(tmp_path, capsys):
    assert main(["expansivity", "--scenario", str(SCENARIOS / "bad-missing-delta.yaml"),
                 "--out", str(tmp_path)]) == 2
    assert "experiment.delta" in capsys.readouterr().err
    assert not any(tmp_path.iterdir())


def test_cli_wrong_subcommand_exit_2(tmp_path):
    p = _write(tmp_path, BASE)
    assert main(["census", "--scenario", str(p), "--out", str(tmp_path / "o")]) == 2


def test_cli_plot_without_curves_exit_2(tmp_path):
    p = _write(tmp_path, BASE)
    assert main(["plot", "--scenario", str(p), "--out", str(tmp_path / "o")]) == 2


def test_cli_runtime_failure_exit_3(tmp_path):
    data = {"name": "np", "map": {"name": "linear"},
            "experiment": {"kind": "manifolds", "point": [0.5, 0.5], "delta": 0.1}}
    p = _write(tmp_path, data)
    assert main(["manifolds", "--scenario", str(p), "--out", str(tmp_path / "o")]) == 3


def test_cli_bad_yaml_exit_2(tmp_path):
    p = tmp_path / "x.yaml"
    p.write_text("map: [unclosed\n")
    assert main(["census", "--scenario", str(p), "--out", str(tmp_path)]) == 2


def test_cli_census_and_plot(tmp_path):
    out = tmp_path / "o"
    assert main(["census", "--scenario", str(SCENARIOS / "cubic-census.yaml"), "--out", str(out),
                 "--threads", "2"]) == 0
    rep = yaml.safe_load((out / "cubic-census.report.txt").read_text())
    assert rep["results"]["max_count"] == 3
    assert (out / "cubic-census.census.csv").read_text().startswith("a,c,count,contact_order\n")
    assert (out / "cubic-census.svg").exists()


def test_thread_count_does_not_change_bytes(tmp_path):
    scen = SCENARIOS / "catmap-expansivity.yaml"
    data = yaml.safe_load(scen.read_text())
    data["experiment"]["sampler"] = {"kind": "grid", "n": 60, "centers": 12}
    p = _write(tmp_path, data)
    for t in (1, 3):
        assert main(["expansivity", "--scenario", str(p), "--out", str(tmp_path / f"o{t}"),
                     "--threads", str(t)]) == 0
    for name in ("catmap-expansivity.report.txt", "catmap-expansivity.witnesses.csv"):
        assert (tmp_path / "o1" / name).read_bytes() == (tmp_path / "o3" / name).read_bytes()


def test_seed_flag_overrides(tmp_path):
    p = _write(tmp_path, BASE)
    assert main(["expansivity", "--scenario", str(p), "--out", str(tmp_path / "o"),
                 "--seed", "7"]) == 0
    rep = yaml.safe_load((tmp_path / "o" / "t.report.txt").read_text())
    assert rep["scenario"]["seed"] == 7


def test_dump_is_sorted():
    assert dump({"b": 1, "a": 2}).startswith("a: 2")
