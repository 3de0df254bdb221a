"""Config validation, suite dispatch and the ``lawcheck`` command line."""

import json

import pytest

from qlift.cli import build_report, execute, main
from qlift.config import (KINDS, PARAMS, ConfigError, auto_corruption, build_instance,
                          default_config_text, effective, expected_for, parse_config)


def write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg) if not isinstance(cfg, str) else cfg)
    return str(path)


SMALL = {"seed": 1, "budget": 300, "instances": [
    {"name": "rel", "kind": "relation", "params": {"points": 2}, "suites": ["carrier", "lifted", "hoare"]},
    {"name": "lang", "kind": "language", "params": {"alphabet": "ab", "max_len": 2},
     "suites": ["carrier", "lifted"]},
]}


def run_cli(tmp_path, cfg, *extra):
    report = tmp_path / "report.json"
    code = main(["run", "--config", write(tmp_path, cfg), "--report", str(report), "--quiet", *extra])
    return code, (json.loads(report.read_text()) if report.exists() else None)


def test_small_config_passes(tmp_path):
    code, rep = run_cli(tmp_path, SMALL)
    assert code == 0 and rep["status"] == "pass"
    assert [(r["instance"], r["suite"]) for r in rep["results"]] == [
        ("rel", "carrier"), ("rel", "lifted"), ("rel", "hoare"), ("lang", "carrier"), ("lang", "lifted")]
    assert "wall_clock_seconds" not in rep


def test_timing_only_on_request(tmp_path):
    code, rep = run_cli(tmp_path, SMALL, "--timing")
    assert code == 0 and rep["wall_clock_seconds"] >= 0
    assert all("seconds" in r for r in rep["results"])


def test_report_is_deterministic(tmp_path):
    _, a = run_cli(tmp_path, SMALL)
    _, b = run_cli(tmp_path, SMALL, "--jobs", "2")
    assert a == b


def test_seed_and_budget_overrides(tmp_path):
    _, rep = run_cli(tmp_path, SMALL, "--seed", "9", "--budget", "50")
    assert rep["config"]["seed"] == 9 and rep["config"]["budget"] == 50


@pytest.mark.parametrize("kind", ["relation", "language", "heaplet", "disjoint_sets", "vector"])
def test_auto_corruption_flips_exit_code(tmp_path, kind):
    cfg = {"seed": 1, "budget": 200, "instances": [
        {"name": "broken", "kind": kind, "suites": ["carrier", "lifted"], "corrupt": "auto"}]}
    code, rep = run_cli(tmp_path, cfg)
    assert code == 1 and rep["status"] == "fail"
    bad = [r for res in rep["results"] for r in res["reports"] if not r["ok"]]
    assert bad and all(r["witness"] for r in bad)


def test_explicit_corruption_by_label(tmp_path):
    cfg = {"instances": [{"name": "c", "kind": "language", "params": {"max_len": 2},
                          "suites": ["carrier"], "corrupt": {"x": "ε", "y": "a", "value": "b"}}]}
    code, rep = run_cli(tmp_path, cfg)
    assert code == 1
    with pytest.raises(ConfigError, match="no carrier element"):
        build_instance({"name": "c", "kind": "language", "suites": ["carrier"],
                        "corrupt": {"x": "zz", "y": "a"}})


def test_auto_corruption_changes_one_entry():
    from qlift.instances import make_relation
    c = make_relation(2)
    x, y, v = auto_corruption(c)
    assert c.table[x, y] != (-1 if v is None else v)


def test_expected_fail_declared_by_stem():
    assert expected_for("interchange:weak[uniform]", {"interchange:weak"}) == "fail"
    assert expected_for("locality[const:emp]", {"locality[const:emp]"}) == "fail"
    assert expected_for("locality-agreement", {"locality[const:emp]"}) == "pass"


def test_undeclared_refutation_fails_the_run(tmp_path):
    cfg = {"budget": 200, "instances": [
        {"name": "fut", "kind": "futuristic_intervals", "params": {"chain": 3}, "suites": ["futuristic"]}]}
    code, rep = run_cli(tmp_path, cfg)
    assert code == 1
    cfg["instances"][0]["expected_fail"] = ["right-annihilation", "left-distributivity-0"]
    assert run_cli(tmp_path, cfg)[0] == 0


def test_declared_failure_that_holds_fails_the_run(tmp_path):
    cfg = json.loads(json.dumps(SMALL))
    cfg["instances"][0]["expected_fail"] = ["conv-associativity"]
    assert run_cli(tmp_path, cfg)[0] == 1


@pytest.mark.parametrize("text, match", [
    ('{"instances": [', r"cfg\.json:1:\d+"),
    ('{"instances": []}', "field instances"),
    ('{"instances": [{"name": "a", "kind": "relation", "suites": ["nope"]}]}', "field instances/0/suites/0"),
    ('{"instances": [{"name": "a", "kind": "blob", "suites": ["carrier"]}]}', "unknown kind"),
    ('{"instances": [{"name": "a", "kind": "relation", "suites": ["frame"]}]}', "not applicable"),
    ('{"seed": -1, "instances": [{"name": "a", "kind": "relation", "suites": ["carrier"]}]}', "field seed"),
    ('{"instances": [{"name": "a", "kind": "relation", "suites": ["carrier"]},'
     ' {"name": "a", "kind": "relation", "suites": ["carrier"]}]}', "unique"),
])
def test_config_errors(tmp_path, text, match, capsys):
    path = write(tmp_path, text)
    assert main(["run", "--config", path, "--quiet"]) == 2
    assert pytest.raises(ConfigError, parse_config, text, path).match(match)


def test_unknown_parameter_is_config_error(tmp_path):
    cfg = {"instances": [{"name": "a", "kind": "relation", "params": {"pts": 3}, "suites": ["carrier"]}]}
    assert run_cli(tmp_path, cfg)[0] == 2


def test_missing_config_file_is_config_error(tmp_path):
    assert main(["run", "--config", str(tmp_path / "absent.json")]) == 2


def test_bad_jobs_variable(tmp_path, monkeypatch):
    monkeypatch.setenv("LAWCHECK_JOBS", "many")
    assert main(["run", "--config", write(tmp_path, SMALL), "--quiet"]) == 2


def test_default_config_covers_every_kind():
    cfg = parse_config(default_config_text(), "default")
    assert {i["kind"] for i in cfg["instances"]} == set(KINDS)
    assert set(PARAMS) == set(KINDS)
    for inst in cfg["instances"]:
        build_instance(inst)


def test_effective_fills_defaults():
    cfg = effective({"instances": []})
    assert cfg["seed"] == 0 and cfg["budget"] > 0 and cfg["bound"] > 0
    with pytest.raises(ConfigError):
        effective({"instances": []}, budget=0)


def test_crashing_suite_becomes_failed_report(monkeypatch):
    from qlift import config

    def boom(inst, built, cfg):
        raise RuntimeError("boom")

    monkeypatch.setitem(config.SUITE_RUNNERS, "carrier", boom)
    cfg = effective(SMALL)
    res = execute(dict(cfg, instances=[dict(SMALL["instances"][0], suites=["carrier"])]))
    rep = build_report(cfg, res)
    assert rep["status"] == "fail"
    assert res[0]["reports"][0]["law"] == "carrier:error"
    assert "boom" in res[0]["reports"][0]["witness"][0]


def test_demo_command(capsys):
    assert main(["demo", "vector"]) == 0
    out = capsys.readouterr().out
    assert "(5, 4, 7)" in out and out.rstrip().endswith("PASS")
    assert main(["demo", "nonexistent"]) == 2


def test_search_interchange_command(tmp_path, capsys):
    out = tmp_path / "w.json"
    assert main(["search-interchange", "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())) == 8
    assert main(["search-interchange", "--verify", str(out)]) == 0
    data = json.loads(out.read_text())
    data[0]["x"] = [0, 0]
    out.write_text(json.dumps(data))
    assert main(["search-interchange", "--verify", str(out)]) == 1


def test_hoare_command_runs_only_rule_suites(tmp_path):
    report = tmp_path / "h.json"
    code = main(["hoare", "--config", write(tmp_path, SMALL), "--report", str(report), "--quiet"])
    rep = json.loads(report.read_text())
    assert code == 0 and [(r["instance"], r["suite"]) for r in rep["results"]] == [("rel", "hoare")]
    cfg = {"instances": [SMALL["instances"][1]]}
    assert main(["hoare", "--config", write(tmp_path, cfg), "--quiet"]) == 2


def test_long_kind_names_are_accepted():
    for kind in ("infinite_words", "futuristic_intervals"):
        build_instance({"name": "x", "kind": kind, "suites": ["carrier"]})
