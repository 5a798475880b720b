"""Delete-relaxation heuristics.

Negative preconditions are ignored in the relaxation. A negative goal atom that
is currently true costs its cheapest relaxed deleter; with no deleter at all the
estimate is infinite.

:class:`Heuristic` runs the compiled Dijkstra-style exploration. The
``reference_*`` functions compute the same h_add and h_max values by plain
Bellman-Ford iteration in numpy and exist to cross-check it.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from ..pddl.grounding import GroundTask
from ..pddl.semantics import State
from . import _kernels as K
from .compiled import Compiled, compile_task, mask

INF = float("inf")


class Heuristic:
    """Relaxed-cost estimates toward one goal over a compiled action table."""

    def __init__(self, compiled: Compiled, goal_pos: Iterable[int], goal_neg: Iterable[int]):
        self.c = compiled
        self.goal_pos = np.array(sorted(goal_pos), dtype=np.int64)
        self.goal_neg = np.array(sorted(goal_neg), dtype=np.int64)
        self.goal_pos_mask = mask(self.goal_pos.tolist())
        self.goal_neg_mask = mask(self.goal_neg.tolist())

    def is_goal(self, state: int) -> bool:
        return (state & self.goal_pos_mask) == self.goal_pos_mask and not (state & self.goal_neg_mask)

    def _explore(self, bits: np.ndarray, use_max: bool):
        c = self.c
        return K.explore(bits, c.pre_count, c.cost, c.act_add_flat, c.act_add_starts, c.pre_of_flat,
                         c.pre_of_starts, use_max)

    def _neg_goals(self, bits: np.ndarray, act: np.ndarray) -> list[float]:
        out = []
        for g in self.goal_neg.tolist():
            if bits[g]:
                _, v = K.cheapest_deleter(g, act, self.c.del_flat, self.c.del_starts)
                out.append(v)
        return out

    def h_add(self, state: int) -> float:
        if self.is_goal(state):
            return 0.0
        bits = self.c.bits(state)
        atom, act, _ = self._explore(bits, False)
        return float(atom[self.goal_pos].sum()) + sum(self._neg_goals(bits, act))

    def h_max(self, state: int) -> float:
        if self.is_goal(state):
            return 0.0
        bits = self.c.bits(state)
        atom, act, _ = self._explore(bits, True)
        parts = self._neg_goals(bits, act)
        if len(self.goal_pos):
            parts.append(float(atom[self.goal_pos].max()))
        return max(parts, default=0.0)

    def h_ff(self, state: int) -> tuple[float, list[int]]:
        """Cost of a relaxed plan built from h_add supporters, plus its applicable actions."""
        if self.is_goal(state):
            return 0.0, []
        c = self.c
        bits = c.bits(state)
        atom, act, sup = self._explore(bits, False)
        value, preferred = K.relaxed_plan(bits, atom, act, sup, self.goal_pos, self.goal_neg, c.del_flat,
                                          c.del_starts, c.pre_flat, c.pre_starts, c.pre_count, c.neg_flat,
                                          c.neg_bounds, c.cost)
        return float(value), preferred.tolist()

    def blind(self, state: int) -> float:
        return 0.0 if self.is_goal(state) else self.c.min_cost


def _state_mask(state) -> int:
    return mask(state.atoms if isinstance(state, State) else state)


def h_add(state, task: GroundTask, compiled: Compiled | None = None) -> float:
    """Additive relaxed cost from ``state`` (a :class:`State` or set of atom ids) to the goal."""
    if task.unsatisfiable_static_goal:
        return INF
    return Heuristic(compiled or compile_task(task), task.goal_pos, task.goal_neg).h_add(_state_mask(state))


def h_max(state, task: GroundTask, compiled: Compiled | None = None) -> float:
    """Admissible max-cost relaxation."""
    if task.unsatisfiable_static_goal:
        return INF
    return Heuristic(compiled or compile_task(task), task.goal_pos, task.goal_neg).h_max(_state_mask(state))


def h_ff(state, task: GroundTask, compiled: Compiled | None = None) -> float:
    if task.unsatisfiable_static_goal:
        return INF
    return Heuristic(compiled or compile_task(task), task.goal_pos, task.goal_neg).h_ff(_state_mask(state))[0]


def _fixpoint(c: Compiled, bits: np.ndarray, combine) -> tuple[np.ndarray, np.ndarray]:
    atom = np.where(bits.astype(bool), 0.0, INF)
    atom[c.false_atom] = INF
    if not c.actions:
        return atom, np.zeros(0)
    targets = c.add_targets
    while True:
        act = combine.reduceat(atom[c.pre_flat], c.pre_starts) + c.cost
        best = np.minimum.reduceat(act[c.add_acts], c.add_starts)
        better = best < atom[targets]
        if not better.any():
            return atom, act
        atom[targets[better]] = best[better]


def _reference(state, task: GroundTask, combine, total) -> float:
    if task.unsatisfiable_static_goal:
        return INF
    c = compile_task(task)
    s = _state_mask(state)
    if Heuristic(c, task.goal_pos, task.goal_neg).is_goal(s):
        return 0.0
    bits = c.bits(s)
    atom, act = _fixpoint(c, bits, combine)
    parts = [float(atom[g]) for g in sorted(task.goal_pos)]
    for g in sorted(task.goal_neg):
        if bits[g]:
            dels = c.deleters.get(g)
            parts.append(float(act[dels].min()) if dels else INF)
    return total(parts)


def reference_h_add(state, task: GroundTask) -> float:
    return _reference(state, task, np.add, sum)


def reference_h_max(state, task: GroundTask) -> float:
    return _reference(state, task, np.maximum, lambda xs: max(xs, default=0.0))
