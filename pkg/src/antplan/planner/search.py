"""Anytime forward search minimizing total action cost.

The default strategy runs a lazy greedy best-first search with preferred
operators to find a first plan, then restarts weighted A* with a decreasing
weight schedule. Every restart only accepts plans strictly cheaper than the
incumbent. When a restart exhausts its open list the incumbent is optimal.
"""

from __future__ import annotations

import gc
import heapq
import random
import time
from dataclasses import dataclass, field

from ..pddl.grounding import GroundTask
from ..pddl.semantics import Plan
from .compiled import Compiled, compile_task
from .heuristics import INF, Heuristic

HEURISTICS = ("h_add", "h_ff", "blind")
STRATEGIES = ("greedy_best_first_then_improve", "weighted_astar")


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    deadline: float = 30.0
    heuristic: str = "h_ff"
    strategy: str = "greedy_best_first_then_improve"
    weights: tuple[float, ...] = (5.0, 3.0, 2.0, 1.5, 1.0)
    seed: int = 0
    # optional expansion cap; makes runs independent of machine speed
    max_expansions: int | None = None
    prune_with_hmax: bool = True
    # False returns the first plan found instead of improving it
    anytime: bool = True

    def __post_init__(self):
        if not self.deadline > 0:
            raise ValueError(f"deadline must be positive, got {self.deadline}")
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"unknown heuristic {self.heuristic!r}; choose from {', '.join(HEURISTICS)}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; choose from {', '.join(STRATEGIES)}")
        if not self.weights or any(w < 1 for w in self.weights):
            raise ValueError("weights must be a non-empty list of values >= 1")
        if self.max_expansions is not None and self.max_expansions < 1:
            raise ValueError("max_expansions must be positive")


@dataclass
class PlanResult:
    plan: Plan | None
    proven_optimal: bool = False
    unsolvable: bool = False
    timed_out: bool = False
    expanded: int = 0
    generated: int = 0
    elapsed: float = 0.0
    incumbents: list[int] = field(default_factory=list)

    @property
    def solved(self) -> bool:
        return self.plan is not None

    @property
    def cost(self) -> int | None:
        return None if self.plan is None else self.plan.cost


class _OutOfTime(Exception):
    pass


class _Search:
    def __init__(self, task: GroundTask, cfg: SearchConfig, compiled: Compiled, start: float):
        self.task = task
        self.cfg = cfg
        self.c = compiled
        self.h = Heuristic(compiled, task.goal_pos, task.goal_neg)
        self.rng = random.Random(cfg.seed)
        self.stop_at = start + cfg.deadline
        self.init = sum(1 << i for i in task.init)
        self.expanded = 0
        self.generated = 0
        self.counter = 0
        self._hcache: dict[int, tuple[float, frozenset[int]]] = {}
        self._hmax: dict[int, float] = {}

    def check(self):
        if time.monotonic() >= self.stop_at:
            raise _OutOfTime
        if self.cfg.max_expansions is not None and self.expanded >= self.cfg.max_expansions:
            raise _OutOfTime

    def tie(self) -> tuple[float, int]:
        self.counter += 1
        return self.rng.random(), self.counter

    def evaluate(self, s: int) -> tuple[float, frozenset[int]]:
        hit = self._hcache.get(s)
        if hit is None:
            kind = self.cfg.heuristic
            if kind == "h_ff":
                v, pref = self.h.h_ff(s)
                hit = (v, frozenset(pref))
            elif kind == "h_add":
                hit = (self.h.h_add(s), frozenset())
            else:
                hit = (self.h.blind(s), frozenset())
            self._hcache[s] = hit
        return hit

    def hmax(self, s: int) -> float:
        v = self._hmax.get(s)
        if v is None:
            v = self._hmax[s] = self.h.h_max(s)
        return v

    def path(self, parents: dict[int, tuple[int | None, int]], s: int) -> Plan:
        steps = []
        while True:
            prev, a = parents[s]
            if prev is None:
                break
            steps.append(self.c.actions[a])
            s = prev
        return Plan(tuple(reversed(steps)))

    def greedy(self) -> Plan | None:
        """Lazy greedy best-first search alternating a preferred-operator queue."""
        c = self.c
        main: list = []
        pref: list = []
        heapq.heappush(main, (0.0, 0, *self.tie(), self.init, None, -1))
        parents: dict[int, tuple[int | None, int]] = {}
        best_h = INF
        prio = [0, 0]  # main, preferred
        while main or pref:
            self.check()
            use_pref = bool(pref) and (not main or prio[1] <= prio[0])
            queue = pref if use_pref else main
            prio[1 if use_pref else 0] += 1
            _, g, _, _, s, prev, a = heapq.heappop(queue)
            if s in parents:
                continue
            parents[s] = (prev, a)
            self.expanded += 1
            if self.h.is_goal(s):
                return self.path(parents, s)
            h, preferred = self.evaluate(s)
            if h == INF:
                continue
            if h < best_h:
                best_h = h
                prio[1] -= 1000
            for b in c.applicable(s).tolist():
                s2 = c.succ(s, b)
                if s2 in parents:
                    continue
                self.generated += 1
                entry = (h, g + int(c.cost[b]), *self.tie(), s2, s, b)
                heapq.heappush(main, entry)
                if b in preferred:
                    heapq.heappush(pref, entry)
        return None

    def wastar(self, w: float, bound: float) -> Plan | None:
        """Lazy weighted A* accepting only plans of cost <= bound; None when exhausted.

        Successors are queued with their parent's estimate and evaluated when
        popped. States reached through preferred operators also go to a second
        queue that is popped in alternation. Pruning is by g, by h_max against
        the bound, and by relaxed dead ends, so exhaustion proves that no plan
        within the bound exists.
        """
        c = self.c
        best_g: dict[int, int] = {self.init: 0}
        expanded_g: dict[int, int] = {}
        parents: dict[int, tuple[int | None, int]] = {self.init: (None, -1)}
        main: list = [(0.0, 0.0, *self.tie(), 0, self.init)]
        pref: list = []
        prio = [0, 0]
        best_h = INF
        while main or pref:
            self.check()
            use_pref = bool(pref) and (not main or prio[1] <= prio[0])
            queue = pref if use_pref else main
            prio[1 if use_pref else 0] += 1
            _, _, _, _, g, s = heapq.heappop(queue)
            if g != best_g[s] or expanded_g.get(s, INF) <= g:
                continue
            expanded_g[s] = g
            self.expanded += 1
            h, preferred = self.evaluate(s)
            if h == INF:
                continue
            if self.cfg.prune_with_hmax and g + self.hmax(s) > bound:
                continue
            if h < best_h:
                best_h = h
                prio[1] -= 1000
            for b in c.applicable(s).tolist():
                g2 = g + int(c.cost[b])
                if g2 > bound:
                    continue
                s2 = c.succ(s, b)
                if g2 >= best_g.get(s2, INF):
                    continue
                best_g[s2] = g2
                parents[s2] = (s, b)
                self.generated += 1
                if self.h.is_goal(s2):
                    return self.path(parents, s2)
                entry = (g2 + w * h, h, *self.tie(), g2, s2)
                heapq.heappush(main, entry)
                if b in preferred:
                    heapq.heappush(pref, entry)
        return None


def plan(task: GroundTask, cfg: SearchConfig | None = None, compiled: Compiled | None = None) -> PlanResult:
    """Best plan found for ``task`` before ``cfg.deadline`` seconds elapse.

    ``compiled`` may be passed to reuse the encoding across tasks that share an
    action table. Absence of a plan is reported in the result, never raised.
    """
    cfg = cfg or SearchConfig()
    # Cyclic GC pauses on the large search tables would overshoot the deadline.
    enabled = gc.isenabled()
    gc.disable()
    try:
        return _plan(task, cfg, compiled)
    finally:
        if enabled:
            gc.enable()


def _plan(task: GroundTask, cfg: SearchConfig, compiled: Compiled | None) -> PlanResult:
    start = time.monotonic()
    result = PlanResult(None)
    if task.unsatisfiable_static_goal:
        result.unsolvable = True
        result.elapsed = time.monotonic() - start
        return result
    compiled = compiled or compile_task(task)
    search = _Search(task, cfg, compiled, start)
    incumbent: Plan | None = None

    def finish() -> PlanResult:
        result.plan = incumbent
        result.expanded = search.expanded
        result.generated = search.generated
        result.elapsed = time.monotonic() - start
        return result

    if search.h.is_goal(search.init):
        incumbent = Plan(())
        result.proven_optimal = True
        result.incumbents.append(0)
        return finish()

    try:
        if cfg.strategy == "greedy_best_first_then_improve":
            incumbent = search.greedy()
            if incumbent is None:
                result.unsolvable = True
                return finish()
            result.incumbents.append(incumbent.cost)
            if not cfg.anytime:
                return finish()
        step = 0
        while True:
            w = cfg.weights[min(step, len(cfg.weights) - 1)]
            bound = incumbent.cost - 1 if incumbent is not None else INF
            found = search.wastar(w, bound)
            if found is None:
                if incumbent is None:
                    result.unsolvable = True
                else:
                    result.proven_optimal = True
                return finish()
            incumbent = found
            result.incumbents.append(found.cost)
            if not cfg.anytime:
                return finish()
            step += 1
    except _OutOfTime:
        result.timed_out = incumbent is None
        return finish()


def optimal_oracle(task: GroundTask, node_budget: int = 1_000_000, compiled: Compiled | None = None) -> PlanResult:
    """Uniform-cost search; the returned plan has minimal cost.

    Raises :class:`BudgetExceeded` after expanding more than ``node_budget`` states.
    """
    start = time.monotonic()
    if task.unsatisfiable_static_goal:
        return PlanResult(None, unsolvable=True, elapsed=time.monotonic() - start)
    c = compiled or compile_task(task)
    gp = sum(1 << i for i in task.goal_pos)
    gn = sum(1 << i for i in task.goal_neg)
    init = sum(1 << i for i in task.init)
    best = {init: 0}
    parents: dict[int, tuple[int | None, int]] = {init: (None, -1)}
    heap = [(0, 0, init)]
    counter = 0
    expanded = generated = 0
    closed = set()
    while heap:
        g, _, s = heapq.heappop(heap)
        if s in closed:
            continue
        closed.add(s)
        if (s & gp) == gp and not (s & gn):
            steps = []
            while parents[s][0] is not None:
                prev, a = parents[s]
                steps.append(c.actions[a])
                s = prev
            return PlanResult(Plan(tuple(reversed(steps))), proven_optimal=True, expanded=expanded,
                              generated=generated, elapsed=time.monotonic() - start, incumbents=[g])
        expanded += 1
        if expanded > node_budget:
            raise BudgetExceeded(f"uniform-cost search expanded more than {node_budget} states")
        for b in c.applicable(s).tolist():
            s2 = c.succ(s, b)
            g2 = g + int(c.cost[b])
            if g2 < best.get(s2, INF):
                best[s2] = g2
                parents[s2] = (s, b)
                counter += 1
                generated += 1
                heapq.heappush(heap, (g2, counter, s2))
    return PlanResult(None, unsolvable=True, expanded=expanded, generated=generated,
                      elapsed=time.monotonic() - start)

