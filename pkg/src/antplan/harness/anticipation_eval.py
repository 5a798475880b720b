"""Anticipation-quality and constraint-following experiments."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence

import httpx

from ..anticipation import (
    AnticipationError,
    Anticipator,
    ConstrainedOracleAnticipator,
    LLMAnticipator,
    LLMConfig,
    MarkovAnticipator,
    OracleAnticipator,
    PromptContext,
    fit_markov,
)
from ..household import load_layout
from ..metrics import AnticipationScore, ConstraintCheck, MetricsReport, score, success_ratio, summarize
from ..task_model import Routine, TaskCatalog, bundled_catalog, remainder, sample_routine

MODES = ("oracle", "markov", "llm")

# (trial index, true routine, prompt context) -> anticipator
Factory = Callable[[int, Routine, PromptContext], Anticipator]


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    truth: tuple[str, ...]
    predicted: tuple[str, ...] | None
    score: AnticipationScore | None
    error: str | None = None


@dataclass(frozen=True)
class TrialSetup:
    trial: int
    seed: int
    routine: Routine
    context: PromptContext


def _seeds(seed: int, n: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.getrandbits(31) for _ in range(n)]


def setup_trials(n_trials: int, with_context: bool, *, seed: int = 0, catalog: TaskCatalog | None = None,
                 routine_length: int = 20, prefix_len: int = 2, constraint_note: str | None = None,
                 horizon: str | int = "remainder") -> list[TrialSetup]:
    """Routines and prompt contexts for each trial, fixed by ``seed``.

    Each trial gets its own true routine, two fresh example routines and, with
    context, two fresh worked prefix/completion examples. ``horizon="remainder"``
    asks for as many tasks as the true routine has left.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    catalog = catalog or bundled_catalog()
    out = []
    for i, s in enumerate(_seeds(seed, n_trials)):
        sub = _seeds(s, 5)
        truth = sample_routine(catalog, routine_length, sub[0])
        examples = (sample_routine(catalog, routine_length, sub[1]), sample_routine(catalog, routine_length, sub[2]))
        worked = None
        if with_context:
            worked = tuple((r.tasks[:prefix_len], r.tasks[prefix_len:])
                           for r in (sample_routine(catalog, routine_length, x) for x in sub[3:5]))
        h = len(truth) - prefix_len if horizon == "remainder" else horizon
        ctx = PromptContext(catalog, examples, truth.tasks[:prefix_len], worked, constraint_note, h)
        out.append(TrialSetup(i, s, truth, ctx))
    return out


def markov_factory(catalog: TaskCatalog, *, seed: int = 0, n_training: int = 200,
                   routine_length: int = 20) -> Factory:
    """Markov anticipators fitted once on ``n_training`` independently sampled routines."""
    train = [sample_routine(catalog, routine_length, s) for s in _seeds(seed + 7919, n_training)]
    matrix = fit_markov(train, index=catalog.task_ids)
    return lambda i, truth, ctx: MarkovAnticipator(matrix, seed=seed * 1_000_003 + i)


def llm_factory(config: LLMConfig, client: httpx.Client | None = None) -> Factory:
    anticipator = LLMAnticipator(config, client)
    return lambda i, truth, ctx: anticipator


def mode_factory(mode: str, catalog: TaskCatalog, *, seed: int = 0, llm_config: LLMConfig | None = None,
                 client: httpx.Client | None = None, routine_length: int = 20) -> Factory:
    if mode == "oracle":
        return lambda i, truth, ctx: OracleAnticipator(truth)
    if mode == "markov":
        return markov_factory(catalog, seed=seed, routine_length=routine_length)
    if mode == "llm":
        return llm_factory(llm_config or LLMConfig(), client)
    raise ValueError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")


def run_anticipation_trials(setups: Sequence[TrialSetup], factory: Factory,
                            denominator: str = "remainder") -> list[TrialRecord]:
    """Anticipate and score each trial; anticipator failures are recorded, not raised."""
    records = []
    for t in setups:
        truth = tuple(remainder(t.routine, len(t.context.prefix)))
        try:
            predicted = factory(t.trial, t.routine, t.context).anticipate(t.context).tasks
        except (AnticipationError, httpx.HTTPError) as exc:
            records.append(TrialRecord(t.trial, t.seed, truth, None, None, f"{type(exc).__name__}: {exc}"))
            continue
        denom = len(truth) if denominator == "remainder" else len(t.routine)
        records.append(TrialRecord(t.trial, t.seed, truth, tuple(predicted), score(truth, predicted, denom)))
    return records


def report(records: Sequence[TrialRecord]) -> MetricsReport:
    ok = [r.score for r in records if r.score is not None]
    return summarize(ok, n_failed=len(records) - len(ok))


def run_anticipation_eval(n_trials: int, mode: str = "oracle", with_context: bool = False, *, seed: int = 0,
                          catalog: TaskCatalog | None = None, llm_config: LLMConfig | None = None,
                          client: httpx.Client | None = None, factory: Factory | None = None,
                          routine_length: int = 20, prefix_len: int = 2,
                          denominator: str = "remainder") -> MetricsReport:
    """Mean anticipation scores over ``n_trials`` sampled routines from a 2-task prefix."""
    catalog = catalog or bundled_catalog()
    setups = setup_trials(n_trials, with_context, seed=seed, catalog=catalog,
                          routine_length=routine_length, prefix_len=prefix_len)
    factory = factory or mode_factory(mode, catalog, seed=seed, llm_config=llm_config, client=client,
                                      routine_length=routine_length)
    return report(run_anticipation_trials(setups, factory, denominator))


def constraint_check(scenario: str = "urgent_meeting") -> tuple[ConstraintCheck, str]:
    spec = load_layout().constraint_scenarios[scenario]
    check = ConstraintCheck(tuple(spec.get("required", ())), tuple(spec.get("forbidden", ())),
                            tuple(tuple(o) for o in spec.get("orderings", ())))
    return check, spec["note"]


def run_constraint_eval(n_trials: int, mode: str = "constrained_oracle", scenario: str = "urgent_meeting", *,
                        seed: int = 0, with_context: bool = True, catalog: TaskCatalog | None = None,
                        llm_config: LLMConfig | None = None, client: httpx.Client | None = None,
                        factory: Factory | None = None) -> tuple[float, list[bool]]:
    """Fraction of trials whose anticipation honors the scenario's constraints.

    The scenario's note is appended to every prompt. A failed anticipator call
    counts as a failed trial.
    """
    catalog = catalog or bundled_catalog()
    check, note = constraint_check(scenario)
    setups = setup_trials(n_trials, with_context, seed=seed, catalog=catalog, constraint_note=note, horizon="all")
    if factory is None:
        if mode == "constrained_oracle":
            def factory(i, truth, ctx):
                return ConstrainedOracleAnticipator(truth, check.required, check.forbidden)
        else:
            factory = mode_factory(mode, catalog, seed=seed, llm_config=llm_config, client=client)
    outcomes = []
    for t in setups:
        try:
            predicted = factory(t.trial, t.routine, t.context).anticipate(t.context).tasks
        except (AnticipationError, httpx.HTTPError):
            outcomes.append(False)
            continue
        outcomes.append(check(predicted))
    return success_ratio(outcomes), outcomes
