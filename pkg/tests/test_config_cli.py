import csv
import json
from pathlib import Path

import click
import pytest
from click.testing import CliRunner

from antplan.cli import main, parse_duration
from antplan.config import ConfigError, Settings, load_settings
from antplan.household.scenario import DATA

PDDL = Path(__file__).parent / "fixtures" / "pddl"


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)


# settings file ----------------------------------------------------------------------

def test_defaults_without_file():
    assert load_settings(None) == Settings()


def test_settings_values_and_relative_paths(tmp_path):
    cfg = tmp_path / "conf" / "antplan.ini"
    cfg.parent.mkdir()
    cfg.write_text("[paths]\ncatalog = ../cat.json\n\n[seeds]\nexperiment = 7\n\n"
                   "[planner]\nheuristic = h_add\ntime_unit = 0.5\n\n[llm]\nmodel = local-model\ntemperature = 0\n")
    s = load_settings(cfg)
    assert s.catalog == (tmp_path / "cat.json").resolve()
    assert (s.seed, s.heuristic, s.time_unit, s.llm.model, s.llm.temperature) == (7, "h_add", 0.5, "local-model", 0.0)


@pytest.mark.parametrize("text", ["[paths]\ncatlog = x\n", "[colors]\nred = 1\n", "[seeds]\nexperiment = seven\n",
                                  "no section header\n"])
def test_bad_settings(tmp_path, text):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(text)
    with pytest.raises(ConfigError):
        load_settings(cfg)


def test_bad_config_is_a_cli_error(runner, tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[colors]\nred = 1\n")
    res = runner.invoke(main, ["--config", str(cfg), "routine", "sample"])
    assert res.exit_code == 1 and "unknown section" in res.stderr


@pytest.mark.parametrize("text, seconds", [("30", 30.0), ("30s", 30.0), ("500ms", 0.5), ("2m", 120.0),
                                           ("0.25s", 0.25)])
def test_parse_duration(text, seconds):
    assert parse_duration(text) == seconds


def test_parse_duration_rejects_junk():
    with pytest.raises(click.BadParameter):
        parse_duration("soon")


# catalog, routines, metrics ------------------------------------------------------------

def test_catalog_validate(runner, tmp_path):
    res = invoke(runner, "catalog", "validate", DATA / "catalog.json")
    assert res.exit_code == 0 and "33 tasks" in res.stdout
    bad = tmp_path / "dup.json"
    bad.write_text(json.dumps({"activities": [{"name": "A", "tasks": [{"id": "x"}, {"id": "x"}]}]}))
    assert runner.invoke(main, ["catalog", "validate", str(bad)]).exit_code == 1


def test_routine_sample_is_seeded(runner):
    a = invoke(runner, "routine", "sample", "--length", 20, "--seed", 3)
    b = invoke(runner, "routine", "sample", "--length", 20, "--seed", 3)
    assert a.exit_code == 0 and a.stdout == b.stdout
    assert len(json.loads(a.stdout)) == 20


def test_anticipate_oracle(runner):
    routine = json.loads(invoke(runner, "routine", "sample", "--length", 6, "--seed", 1).stdout)
    res = invoke(runner, "anticipate", "--mode", "oracle", "--prefix", ",".join(routine[:2]),
                 "--truth", ",".join(routine))
    assert res.exit_code == 0 and json.loads(res.stdout) == routine[2:]


def test_metrics_score(runner, tmp_path):
    (tmp_path / "t.json").write_text('["A", "B", "C", "D"]')
    (tmp_path / "p.json").write_text('["A", "C", "B", "D"]')
    res = invoke(runner, "metrics", "score", "--truth", tmp_path / "t.json", "--predicted", tmp_path / "p.json")
    out = json.loads(res.stdout)
    assert out["poc"] == pytest.approx(5 / 6) and out["krcc"] == pytest.approx(4 / 6) and out["miss_ratio"] == 0


def test_metrics_batch(runner, tmp_path):
    src = tmp_path / "in.csv"
    with src.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["truth", "predicted"])
        w.writerow([json.dumps(list("ABCD")), json.dumps(list("ABCD"))])
        w.writerow([json.dumps(list("ABCD")), json.dumps(list("AC"))])
    res = invoke(runner, "metrics", "batch", src, "--out", tmp_path / "scores.csv")
    assert res.exit_code == 0
    assert json.loads(res.stdout)["miss_ratio"] == pytest.approx(0.25)
    assert len(list(csv.DictReader((tmp_path / "scores.csv").open()))) == 3


# planning -------------------------------------------------------------------------------

def test_plan_solve_and_validate(runner, tmp_path):
    out = tmp_path / "milk.plan"
    res = invoke(runner, "plan", "solve", PDDL / "deliver_domain.pddl", PDDL / "deliver_milk.pddl",
                 "--deadline", "2s", "--out", out)
    assert res.exit_code == 0 and "cost 40" in res.stderr
    res = invoke(runner, "plan", "validate", PDDL / "deliver_domain.pddl", PDDL / "deliver_milk.pddl", out)
    assert res.exit_code == 0 and res.stdout.startswith("valid")


def test_plan_validate_rejects_bad_plan(runner, tmp_path):
    bad = tmp_path / "bad.plan"
    bad.write_text("(move kitchen desk)\n")
    res = invoke(runner, "plan", "validate", PDDL / "deliver_domain.pddl", PDDL / "deliver_milk.pddl", bad)
    assert res.exit_code == 1 and res.stdout.startswith("invalid")


def test_plan_unsolvable_exit_code(runner, tmp_path):
    problem = tmp_path / "split.pddl"
    problem.write_text("(define (problem split) (:domain delivery) (:objects milk - item kitchen desk - place "
                       "left right - slot) (:init (agent_at kitchen) (item_at milk kitchen) (free left) (free right)) "
                       "(:goal (and (holding milk left) (holding milk right))))")
    res = invoke(runner, "plan", "solve", PDDL / "deliver_domain.pddl", problem, "--deadline", "5s")
    assert res.exit_code == 2


def test_plan_timeout_exit_code(runner, tmp_path):
    problem = tmp_path / "big.pddl"
    tasks = "cook_breakfast,wash_clothes,dry_clothes,bake_cake,water_roses,make_bed,iron_clothes,vacuum_living_room"
    assert invoke(runner, "scenario", "emit", "--tasks", tasks, "--out", problem, "--domain-out", tmp_path / "d.pddl").exit_code == 0
    res = invoke(runner, "plan", "solve", tmp_path / "d.pddl", problem, "--deadline", "1ms")
    assert res.exit_code == 3


def test_plan_parse_error_reported(runner, tmp_path):
    broken = tmp_path / "broken.pddl"
    broken.write_text("(define (problem x)")
    res = runner.invoke(main, ["plan", "solve", str(PDDL / "deliver_domain.pddl"), str(broken)])
    assert res.exit_code == 1 and "Error" in res.stderr


def test_scenario_emit(runner, tmp_path):
    a = invoke(runner, "scenario", "emit", "--seed", 5, "--tasks", "make_coffee,serve_coffee")
    b = invoke(runner, "scenario", "emit", "--seed", 5, "--tasks", "make_coffee,serve_coffee")
    assert a.exit_code == 0 and a.stdout == b.stdout
    assert "(has_coffee mug)" in a.stdout and "(:metric minimize (total-cost))" in a.stdout
    res = runner.invoke(main, ["scenario", "emit", "--tasks", "fly_kite"])
    assert res.exit_code == 1 and "fly_kite" in res.stderr


def test_exp_anticipation_writes_files(runner, tmp_path):
    res = invoke(runner, "exp", "anticipation", "--mode", "oracle", "--trials", 5, "--context", "on",
                 "--out-dir", tmp_path)
    assert res.exit_code == 0
    summary = json.loads((tmp_path / "anticipation_oracle_context-on.json").read_text())
    assert summary["krcc"] == 1.0
    assert (tmp_path / "anticipation_oracle_context-on.csv").is_file()
