"""Command-line entry point (``antplan``)."""

from __future__ import annotations

import csv
import json
import re
import sys
from pathlib import Path

import click

from . import household
from .anticipation import (
    AnticipationError,
    LLMAnticipator,
    MarkovAnticipator,
    OracleAnticipator,
    PromptContext,
)
from .config import ConfigError, Settings, load_settings
from .harness import (
    emit_anticipation_results,
    emit_results,
    load_script,
    planning_summary,
    run_anticipation_trials,
    run_constraint_eval,
    run_planning_experiment,
    run_script,
    setup_trials,
)
from .harness.anticipation_eval import TrialRecord, markov_factory, mode_factory, report
from .harness.interrupt import bundled_script_path
from .harness.results import write_json
from .metrics import MetricError, score
from .pddl import PddlError, format_plan, ground, parse_domain, parse_plan, parse_problem, validate
from .planner import SearchConfig, plan
from .task_model import TaskModelError, bundled_catalog, load_catalog, sample_routine

EXIT_SOLVED, EXIT_UNSOLVABLE, EXIT_TIMEOUT = 0, 2, 3


def parse_duration(text: str) -> float:
    """Seconds from ``30``, ``30s``, ``500ms`` or ``2m``."""
    m = re.fullmatch(r"\s*([0-9]*\.?[0-9]+)\s*(ms|s|m)?\s*", text)
    if not m:
        raise click.BadParameter(f"not a duration: {text!r}")
    value = float(m.group(1))
    return value * {"ms": 0.001, "s": 1.0, "m": 60.0, None: 1.0}[m.group(2)]


def _csv_list(text: str | None) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()] if text else []


def _settings(ctx: click.Context) -> Settings:
    return ctx.obj["settings"]


def _catalog(ctx: click.Context):
    s = _settings(ctx)
    return load_catalog(s.catalog) if s.catalog else bundled_catalog()


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Settings file (INI-style key = value).")
@click.pass_context
def main(ctx: click.Context, config_path):
    """Anticipate household tasks and plan for them jointly."""
    try:
        ctx.obj = {"settings": load_settings(config_path)}
    except ConfigError as exc:
        raise click.ClickException(str(exc))


# catalog / routine ---------------------------------------------------------

@main.group()
def catalog():
    """Task catalogs."""


@catalog.command("validate")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def catalog_validate(path):
    try:
        cat = load_catalog(path)
    except TaskModelError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"ok: {len(cat.activities)} activities, {len(cat)} tasks")


@main.group()
def routine():
    """Routine sampling."""


@routine.command("sample")
@click.option("--length", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=None)
@click.pass_context
def routine_sample(ctx, length, seed):
    try:
        r = sample_routine(_catalog(ctx), length, seed)
    except (TaskModelError, ValueError) as exc:
        raise click.ClickException(str(exc))
    click.echo(json.dumps(list(r.tasks)))


# anticipation ----------------------------------------------------------------

@main.command()
@click.option("--mode", type=click.Choice(["oracle", "markov", "llm"]), default="oracle", show_default=True)
@click.option("--prefix", required=True, help="Comma-separated prefix of today's routine.")
@click.option("--horizon", default="all", show_default=True, help="Number of tasks to predict, or 'all'.")
@click.option("--truth", default=None, help="Comma-separated full routine (oracle mode).")
@click.option("--seed", type=int, default=None, help="Seed for example routines and the Markov walk.")
@click.option("--context/--no-context", default=False, help="Include two worked examples in the prompt.")
@click.pass_context
def anticipate(ctx, mode, prefix, horizon, truth, seed, context):
    """Predict the rest of a routine from its prefix."""
    settings = _settings(ctx)
    cat = _catalog(ctx)
    seed = settings.seed if seed is None else seed
    h = horizon if horizon == "all" else int(horizon)
    setup = setup_trials(1, context, seed=seed, catalog=cat)[0]
    try:
        pctx = PromptContext(cat, setup.context.example_routines, tuple(_csv_list(prefix)),
                             setup.context.contextual_examples, horizon=h)
        if mode == "oracle":
            if not truth:
                raise click.UsageError("oracle mode needs --truth")
            antic = OracleAnticipator(_csv_list(truth))
        elif mode == "markov":
            antic = markov_factory(cat, seed=seed)(0, setup.routine, pctx)
            assert isinstance(antic, MarkovAnticipator)
        else:
            antic = LLMAnticipator(settings.llm)
        result = antic.anticipate(pctx)
    except AnticipationError as exc:
        raise click.ClickException(str(exc))
    click.echo(json.dumps(list(result.tasks)))


# metrics -------------------------------------------------------------------

@main.group()
def metrics():
    """Anticipation-quality metrics."""


def _read_list(path: str) -> list[str]:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
        raise click.ClickException(f"{path}: expected a JSON array of task ids")
    return data


@metrics.command("score")
@click.option("--truth", "truth_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--predicted", "pred_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--denominator", type=click.Choice(["remainder", "full"]), default="remainder", show_default=True)
@click.option("--routine-length", type=int, default=None, help="Full routine length, for --denominator full.")
def metrics_score(truth_path, pred_path, denominator, routine_length):
    """Score one prediction (JSON arrays) and print the result as JSON."""
    truth, pred = _read_list(truth_path), _read_list(pred_path)
    denom = None
    if denominator == "full":
        if routine_length is None:
            raise click.UsageError("--denominator full needs --routine-length")
        denom = routine_length
    try:
        click.echo(json.dumps(score(truth, pred, denom).as_dict()))
    except MetricError as exc:
        raise click.ClickException(str(exc))


@metrics.command("batch")
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Output CSV of per-row scores.")
def metrics_batch(input_csv, out):
    """Score every row of a CSV with JSON-array columns 'truth' and 'predicted'."""
    records = []
    try:
        with open(input_csv, newline="") as fh:
            for i, row in enumerate(csv.DictReader(fh)):
                truth, pred = json.loads(row["truth"]), json.loads(row["predicted"])
                records.append(TrialRecord(i, 0, tuple(truth), tuple(pred), score(truth, pred)))
    except (KeyError, json.JSONDecodeError, MetricError) as exc:
        raise click.ClickException(f"{input_csv}: {exc}")
    emit_anticipation_results(records, out)
    click.echo(json.dumps(report(records).as_dict()))


# planning ------------------------------------------------------------------

@main.group("plan")
def plan_group():
    """Solve and validate PDDL problems."""


def _load_task(domain_path, problem_path):
    try:
        domain = parse_domain(Path(domain_path).read_text())
        problem = parse_problem(Path(problem_path).read_text(), domain)
        return ground(domain, problem)
    except PddlError as exc:
        raise click.ClickException(str(exc))


@plan_group.command("solve")
@click.argument("domain", type=click.Path(exists=True, dir_okay=False))
@click.argument("problem", type=click.Path(exists=True, dir_okay=False))
@click.option("--deadline", default="30s", show_default=True)
@click.option("--heuristic", type=click.Choice(["h_add", "h_ff", "blind"]), default="h_ff", show_default=True)
@click.option("--strategy", type=click.Choice(["greedy_best_first_then_improve", "weighted_astar"]),
              default="greedy_best_first_then_improve", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def plan_solve(domain, problem, deadline, heuristic, strategy, seed, out):
    """Exit status 0 when solved, 2 when proven unsolvable, 3 when out of time."""
    task = _load_task(domain, problem)
    result = plan(task, SearchConfig(deadline=parse_duration(deadline), heuristic=heuristic, strategy=strategy,
                                     seed=seed))
    if result.plan is None:
        click.echo("unsolvable" if result.unsolvable else "no plan found before the deadline", err=True)
        sys.exit(EXIT_UNSOLVABLE if result.unsolvable else EXIT_TIMEOUT)
    text = format_plan(result.plan)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)
    click.echo(f"cost {result.plan.cost}, {len(result.plan)} actions, "
               f"{'optimal' if result.proven_optimal else 'not proven optimal'}, "
               f"{result.expanded} expanded in {result.elapsed:.2f}s", err=True)


@plan_group.command("validate")
@click.argument("domain", type=click.Path(exists=True, dir_okay=False))
@click.argument("problem", type=click.Path(exists=True, dir_okay=False))
@click.argument("plan_file", type=click.Path(exists=True, dir_okay=False))
def plan_validate(domain, problem, plan_file):
    task = _load_task(domain, problem)
    try:
        p = parse_plan(Path(plan_file).read_text(), task)
    except PddlError as exc:
        raise click.ClickException(str(exc))
    rep = validate(p, task)
    if rep.valid:
        click.echo(f"valid: {len(p)} actions, cost {rep.cost}")
    else:
        click.echo(f"invalid: {rep.reason}")
        sys.exit(1)


# scenario ------------------------------------------------------------------

@main.group()
def scenario():
    """Household problem generation."""


@scenario.command("emit")
@click.option("--seed", type=int, default=None, help="Placement seed; omit for the canonical layout.")
@click.option("--tasks", default="", help="Comma-separated task ids for the joint goal.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--domain-out", type=click.Path(dir_okay=False), default=None, help="Also write the domain file.")
@click.pass_context
def scenario_emit(ctx, seed, tasks, out, domain_out):
    settings = _settings(ctx)
    cat = _catalog(ctx)
    goal_map = household.load_goal_map(settings.goalmap)
    ids = _csv_list(tasks)
    unknown = [t for t in ids if t not in cat]
    if unknown:
        raise click.ClickException(f"unknown tasks: {', '.join(unknown)}")
    try:
        goal = household.compose_goal([cat.all_tasks[t] for t in ids], goal_map)
    except household.GoalError as exc:
        raise click.ClickException(str(exc))
    domain = household.load_domain(settings.domain)
    text = household.synthesize_problem(household.build_scenario(household.ScenarioSpec(seed=seed), domain), goal)
    if domain_out:
        Path(domain_out).write_text(Path(settings.domain).read_text() if settings.domain else household.domain_text())
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


# experiments -----------------------------------------------------------------

@main.group()
def exp():
    """End-to-end experiments; each writes a CSV and a JSON summary."""


@exp.command("anticipation")
@click.option("--mode", type=click.Choice(["oracle", "markov", "llm"]), default="oracle", show_default=True)
@click.option("--trials", type=int, default=500, show_default=True)
@click.option("--context", type=click.Choice(["on", "off"]), default="off", show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--denominator", type=click.Choice(["remainder", "full"]), default="remainder", show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default="results", show_default=True)
@click.pass_context
def exp_anticipation(ctx, mode, trials, context, seed, denominator, out_dir):
    settings = _settings(ctx)
    cat = _catalog(ctx)
    seed = settings.seed if seed is None else seed
    setups = setup_trials(trials, context == "on", seed=seed, catalog=cat)
    factory = mode_factory(mode, cat, seed=seed, llm_config=settings.llm)
    records = run_anticipation_trials(setups, factory, denominator)
    stem = Path(out_dir) / f"anticipation_{mode}_context-{context}"
    emit_anticipation_results(records, stem.with_suffix(".csv"))
    summary = report(records).as_dict()
    write_json(summary, stem.with_suffix(".json"))
    click.echo(json.dumps(summary))


@exp.command("constraints")
@click.option("--mode", type=click.Choice(["constrained_oracle", "oracle", "markov", "llm"]),
              default="constrained_oracle", show_default=True)
@click.option("--trials", type=int, default=20, show_default=True)
@click.option("--scenario", "scenario_name", default="urgent_meeting", show_default=True)
@click.option("--seed", type=int, default=None)
@click.pass_context
def exp_constraints(ctx, mode, trials, scenario_name, seed):
    """Success ratio of anticipations under a constraint scenario."""
    settings = _settings(ctx)
    seed = settings.seed if seed is None else seed
    ratio, outcomes = run_constraint_eval(trials, mode, scenario_name, seed=seed, catalog=_catalog(ctx),
                                          llm_config=settings.llm)
    click.echo(json.dumps({"success_ratio": ratio, "trials": len(outcomes)}))


@exp.command("planning")
@click.option("--ks", default="0,1,3,6", show_default=True)
@click.option("--reps", type=int, default=10, show_default=True)
@click.option("--time-unit", default=None, help="Deadline per task in a batch, e.g. 2s or 30s.")
@click.option("--routine-length", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--heuristic", type=click.Choice(["h_add", "h_ff", "blind"]), default=None)
@click.option("--reanticipate", type=click.Choice(["once", "per_batch"]), default="once", show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default="results", show_default=True)
@click.pass_context
def exp_planning(ctx, ks, reps, time_unit, routine_length, seed, heuristic, reanticipate, out_dir):
    """Paired myopic-versus-anticipatory trials with the oracle anticipator."""
    settings = _settings(ctx)
    unit = parse_duration(time_unit) if time_unit else settings.time_unit
    seed = settings.seed if seed is None else seed
    cfg = SearchConfig(deadline=unit, heuristic=heuristic or settings.heuristic)
    k_list = sorted({int(k) for k in _csv_list(ks)} | {0})

    def progress(t):
        parts = ", ".join(f"k={k}: {t.ratio(k)[0]:.3f}" for k in sorted(t.episodes) if 0 in t.episodes)
        click.echo(f"trial {t.trial} seed {t.seed}: cost ratios {parts}", err=True)

    trials = run_planning_experiment(reps, k_list, time_unit=unit, routine_length=routine_length, seed=seed,
                                     cfg=cfg, catalog=_catalog(ctx), reanticipate=reanticipate, progress=progress)
    emit_results(trials, Path(out_dir) / "planning.csv")
    summary = planning_summary(trials)
    write_json(summary, Path(out_dir) / "planning.json")
    click.echo(json.dumps(summary))


@exp.command("interrupt")
@click.option("--script", "script_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Interrupt script (JSON); defaults to the bundled cancel-breakfast script.")
@click.option("--time-unit", default=None)
@click.option("--out-dir", type=click.Path(file_okay=False), default="results", show_default=True)
@click.pass_context
def exp_interrupt(ctx, script_path, time_unit, out_dir):
    settings = _settings(ctx)
    unit = parse_duration(time_unit) if time_unit else settings.time_unit
    script = load_script(script_path or bundled_script_path())
    transcript = run_script(script, SearchConfig(deadline=unit, heuristic=settings.heuristic), unit)
    data = transcript.to_json()
    write_json(data, Path(out_dir) / "interrupt.json")
    click.echo(json.dumps({"ok": transcript.ok, **transcript.checks}))
    if not transcript.ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
