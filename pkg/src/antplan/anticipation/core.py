"""Prompt contexts, anticipations, and the deterministic oracle anticipator."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Protocol, Sequence, Union

from ..task_model import Routine, TaskCatalog, remainder

Horizon = Union[int, str]  # a task count, or "all"


class AnticipationError(Exception):
    pass


class PrefixMismatch(AnticipationError):
    pass


class UnknownTask(AnticipationError):
    pass


@dataclass(frozen=True)
class PromptContext:
    catalog: TaskCatalog
    example_routines: tuple[Routine, ...]
    prefix: tuple[str, ...]
    contextual_examples: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...] | None = None
    constraint_note: str | None = None
    horizon: Horizon = "all"
    # free-form JSON-able world description, used when re-anticipating after an interrupt
    state_summary: dict | None = None

    def __post_init__(self):
        for t in self.prefix:
            if t not in self.catalog:
                raise UnknownTask(f"prefix task {t!r} is not in the catalog")
        if self.horizon != "all" and (not isinstance(self.horizon, int) or self.horizon < 0):
            raise ValueError(f"horizon must be a non-negative integer or 'all', got {self.horizon!r}")

    @property
    def with_context(self) -> bool:
        return bool(self.contextual_examples)

    def limit(self, tasks: Sequence[str]) -> list[str]:
        tasks = list(tasks)
        return tasks if self.horizon == "all" else tasks[: self.horizon]


@dataclass(frozen=True)
class Anticipation:
    tasks: tuple[str, ...]
    raw: str | None = field(default=None, compare=False)

    def __iter__(self):
        return iter(self.tasks)

    def __len__(self) -> int:
        return len(self.tasks)


def filter_to_catalog(anticipation: Anticipation, catalog: TaskCatalog) -> Anticipation:
    """Drop predicted tasks that are not in the catalog; they are ignored downstream."""
    return Anticipation(tuple(t for t in anticipation.tasks if t in catalog), anticipation.raw)


def oracle_anticipate(ctx: PromptContext, truth: Routine | Sequence[str]) -> Anticipation:
    tasks = truth.tasks if isinstance(truth, Routine) else tuple(truth)
    k = len(ctx.prefix)
    if tuple(tasks[:k]) != tuple(ctx.prefix):
        raise PrefixMismatch(f"prefix {list(ctx.prefix)} does not start the true routine")
    return Anticipation(tuple(ctx.limit(remainder(tasks, k))))


class Anticipator(Protocol):
    def anticipate(self, ctx: PromptContext) -> Anticipation: ...


class OracleAnticipator:
    """Returns the true continuation of a known routine."""

    def __init__(self, truth: Routine | Sequence[str]):
        self.truth = truth

    def anticipate(self, ctx: PromptContext) -> Anticipation:
        return oracle_anticipate(ctx, self.truth)


class ScriptedAnticipator:
    """Replays a fixed answer, whatever the prompt. Used for scripted interrupts."""

    def __init__(self, tasks: Sequence[str]):
        self.tasks = tuple(tasks)
        self.calls: list[PromptContext] = []

    def anticipate(self, ctx: PromptContext) -> Anticipation:
        self.calls.append(ctx)
        return filter_to_catalog(Anticipation(tuple(ctx.limit(self.tasks))), ctx.catalog)


class ConstrainedOracleAnticipator:
    """Oracle that edits the true continuation to honor a constraint scenario.

    Forbidden tasks are dropped and missing required tasks are inserted in the
    order the scenario lists them, right after the prefix.
    """

    def __init__(self, truth: Routine | Sequence[str], required: Sequence[str] = (),
                 forbidden: Sequence[str] = ()):
        self.truth = truth
        self.required = tuple(required)
        self.forbidden = set(forbidden)

    def anticipate(self, ctx: PromptContext) -> Anticipation:
        base = oracle_anticipate(replace(ctx, horizon="all"), self.truth).tasks
        kept = [t for t in base if t not in self.forbidden and t not in self.required]
        return Anticipation(tuple(ctx.limit(list(self.required) + kept)))
