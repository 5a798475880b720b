"""First-order Markov baseline over task transitions."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..task_model import Routine
from .core import Anticipation, PromptContext, UnknownTask


@dataclass(frozen=True)
class TransitionMatrix:
    counts: dict[tuple[str, str], int]
    totals: dict[str, int]
    index: tuple[str, ...]
    _rows: dict[str, tuple[tuple[str, ...], tuple[float, ...]]] = field(default_factory=dict, repr=False,
                                                                         compare=False)

    def __post_init__(self):
        rows: dict[str, tuple[list[str], list[float]]] = {}
        order = {t: i for i, t in enumerate(self.index)}
        for (a, b), c in sorted(self.counts.items(), key=lambda kv: (order[kv[0][0]], order[kv[0][1]])):
            nxt, probs = rows.setdefault(a, ([], []))
            nxt.append(b)
            probs.append(c / self.totals[a])
        self._rows.update({a: (tuple(n), tuple(p)) for a, (n, p) in rows.items()})

    def prob(self, src: str, dst: str) -> float:
        total = self.totals.get(src, 0)
        return self.counts.get((src, dst), 0) / total if total else 0.0

    def row(self, src: str) -> dict[str, float]:
        nxt, probs = self._rows.get(src, ((), ()))
        return dict(zip(nxt, probs))

    def as_array(self) -> np.ndarray:
        pos = {t: i for i, t in enumerate(self.index)}
        m = np.zeros((len(self.index), len(self.index)))
        for (a, b), c in self.counts.items():
            m[pos[a], pos[b]] = c / self.totals[a]
        return m

    def __contains__(self, task: str) -> bool:
        return task in self.index


def fit_markov(routines: Sequence[Routine | Sequence[str]], index: Sequence[str] | None = None) -> TransitionMatrix:
    """Count adjacent pairs: P(b | a) = Count(a, b) / Count(a as a transition source)."""
    if not routines:
        raise ValueError("need at least one routine")
    counts: Counter[tuple[str, str]] = Counter()
    totals: Counter[str] = Counter()
    seen: dict[str, None] = {}
    for r in routines:
        tasks = r.tasks if isinstance(r, Routine) else tuple(r)
        for t in tasks:
            seen.setdefault(t)
        for a, b in zip(tasks, tasks[1:]):
            counts[(a, b)] += 1
            totals[a] += 1
    if index is None:
        index = tuple(seen)
    else:
        index = tuple(index) + tuple(t for t in seen if t not in set(index))
    return TransitionMatrix(dict(counts), dict(totals), tuple(index))


def markov_anticipate(m: TransitionMatrix, prefix: Sequence[str], horizon: int, seed: int | None = None) -> Anticipation:
    """Walk the chain from the last prefix task for up to ``horizon`` steps.

    A task with no outgoing transitions ends the walk early. Nothing stops the
    walk from revisiting tasks.
    """
    if not prefix:
        raise ValueError("prefix must be non-empty")
    current = prefix[-1]
    if current not in m:
        raise UnknownTask(f"task {current!r} never appears in the fitted routines")
    rng = random.Random(seed)
    out: list[str] = []
    for _ in range(horizon):
        nxt, probs = m._rows.get(current, ((), ()))
        if not nxt:
            break
        current = rng.choices(nxt, weights=probs)[0]
        out.append(current)
    return Anticipation(tuple(out))


class MarkovAnticipator:
    def __init__(self, matrix: TransitionMatrix, seed: int | None = None):
        self.matrix = matrix
        self.seed = seed

    def anticipate(self, ctx: PromptContext) -> Anticipation:
        horizon = ctx.horizon if ctx.horizon != "all" else len(ctx.catalog) - len(ctx.prefix)
        return markov_anticipate(self.matrix, ctx.prefix, horizon, self.seed)
