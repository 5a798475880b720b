"""Anticipation-quality measures comparing a predicted task list with the truth.

Partial Ordering Count has no published formula. Here it is the fraction of
ground-truth ordered pairs (a before b, both predicted) that the prediction
keeps in the same order, which reads "maintains the relative order of tasks"
literally. Kendall's coefficient is computed over the tasks present in both
lists; absent tasks are the Miss Ratio's business.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence


class MetricError(ValueError):
    pass


class EmptyTruth(MetricError):
    pass


class TooFewCommon(MetricError):
    pass


class EmptyList(MetricError):
    pass


@dataclass(frozen=True)
class AnticipationScore:
    miss_ratio: float
    poc: float
    krcc: float | None
    incorrect: int
    repeats: int

    def as_dict(self) -> dict:
        return asdict(self)


def dedupe(tasks: Iterable[str]) -> list[str]:
    """Keep the first occurrence of every task."""
    seen: set[str] = set()
    out = []
    for t in tasks:
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def miss_ratio(truth: Sequence[str], predicted: Sequence[str], denominator: int | None = None) -> float:
    if not truth:
        raise EmptyTruth("miss ratio needs a non-empty ground truth")
    pset = set(predicted)
    missed = sum(1 for t in truth if t not in pset)
    return missed / (denominator if denominator is not None else len(truth))


def poc(truth: Sequence[str], predicted: Sequence[str]) -> float:
    if not truth:
        raise EmptyTruth("POC needs a non-empty ground truth")
    pos = {t: i for i, t in enumerate(dedupe(predicted))}
    common = [t for t in dedupe(truth) if t in pos]
    pairs = kept = 0
    for i in range(len(common)):
        for j in range(i + 1, len(common)):
            pairs += 1
            kept += pos[common[i]] < pos[common[j]]
    return kept / pairs if pairs else 1.0


def _count_inversions(seq: list[int]) -> int:
    """Merge sort, counting pairs i < j with seq[i] > seq[j]."""
    if len(seq) < 2:
        return 0
    mid = len(seq) // 2
    left, right = seq[:mid], seq[mid:]
    inv = _count_inversions(left) + _count_inversions(right)
    i = j = k = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            seq[k] = left[i]
            i += 1
        else:
            seq[k] = right[j]
            inv += len(left) - i
            j += 1
        k += 1
    seq[k:] = left[i:] + right[j:]
    return inv


def krcc(truth: Sequence[str], predicted: Sequence[str]) -> float:
    """(n_c - n_d) / sqrt((n0 - n1)(n0 - n2)) over the tasks both lists contain.

    Repeated predictions are reduced to their first occurrence before ranking,
    so neither ranking has ties and n1 = n2 = 0.
    """
    tpos = {t: i for i, t in enumerate(dedupe(truth))}
    ranked = [tpos[t] for t in dedupe(predicted) if t in tpos]
    n = len(ranked)
    if n < 2:
        raise TooFewCommon(f"Kendall's coefficient needs at least 2 common tasks, got {n}")
    n0 = n * (n - 1) // 2
    n1 = n2 = 0
    discordant = _count_inversions(list(ranked))
    concordant = n0 - discordant
    return (concordant - discordant) / math.sqrt((n0 - n1) * (n0 - n2))


def incorrect_and_repeats(truth: Sequence[str], predicted: Sequence[str]) -> tuple[int, int]:
    tset = set(truth)
    incorrect = sum(1 for t in predicted if t not in tset)
    repeats = len(predicted) - len(set(predicted))
    return incorrect, repeats


def success_ratio(outcomes: Sequence[bool]) -> float:
    if not outcomes:
        raise EmptyList("success ratio of an empty list")
    return sum(bool(o) for o in outcomes) / len(outcomes)


@dataclass(frozen=True)
class ConstraintCheck:
    """Scenario constraints on an anticipated routine."""

    required: tuple[str, ...] = ()
    forbidden: tuple[str, ...] = ()
    orderings: tuple[tuple[str, str], ...] = ()

    def __call__(self, predicted: Sequence[str]) -> bool:
        pos = {t: i for i, t in enumerate(dedupe(predicted))}
        if any(t not in pos for t in self.required):
            return False
        if any(t in pos for t in self.forbidden):
            return False
        for a, b in self.orderings:
            if a in pos and b in pos and pos[a] > pos[b]:
                return False
        return True


def score(truth: Sequence[str], predicted: Sequence[str], denominator: int | None = None) -> AnticipationScore:
    incorrect, repeats = incorrect_and_repeats(truth, predicted)
    try:
        k = krcc(truth, predicted)
    except TooFewCommon:
        k = None
    return AnticipationScore(
        miss_ratio=miss_ratio(truth, predicted, denominator),
        poc=poc(truth, predicted),
        krcc=k,
        incorrect=incorrect,
        repeats=repeats,
    )


@dataclass(frozen=True)
class MetricsReport:
    n_trials: int
    n_failed: int
    miss_ratio: float
    poc: float
    krcc: float
    incorrect: float
    repeats: float
    # trials whose prediction shared fewer than two tasks with the truth have no KRCC
    n_krcc_undefined: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def summarize(scores: Sequence[AnticipationScore], n_failed: int = 0) -> MetricsReport:
    if not scores:
        nan = float("nan")
        return MetricsReport(0, n_failed, nan, nan, nan, nan, nan)
    ks = [s.krcc for s in scores if s.krcc is not None]
    n = len(scores)
    return MetricsReport(
        n_trials=n,
        n_failed=n_failed,
        miss_ratio=sum(s.miss_ratio for s in scores) / n,
        poc=sum(s.poc for s in scores) / n,
        krcc=sum(ks) / len(ks) if ks else float("nan"),
        incorrect=sum(s.incorrect for s in scores) / n,
        repeats=sum(s.repeats for s in scores) / n,
        n_krcc_undefined=n - len(ks),
    )
