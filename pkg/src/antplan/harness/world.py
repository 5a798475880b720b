"""Simulated household: one grounding per scenario, rebound for every batch goal."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..household import (
    Scenario,
    ScenarioSpec,
    TaskGoalMap,
    build_scenario,
    compose_goal,
    load_domain,
    load_goal_map,
    parse_literal,
    problem_ast,
)
from ..pddl import DomainAst, GroundTask, Literal, ground
from ..planner import Compiled, compile_task


@dataclass(eq=False)
class World:
    domain: DomainAst
    goal_map: TaskGoalMap
    scenario: Scenario
    base: GroundTask
    compiled: Compiled

    @classmethod
    def create(cls, spec: ScenarioSpec | None = None, domain: DomainAst | None = None,
               goal_map: TaskGoalMap | None = None) -> "World":
        domain = domain or load_domain()
        scenario = build_scenario(spec, domain)
        base = ground(domain, problem_ast(scenario, ()))
        return cls(domain, goal_map or load_goal_map(), scenario, base, compile_task(base))

    @property
    def init(self) -> frozenset[int]:
        return self.base.init

    def task(self, state: Iterable[int], goal: Sequence[Literal]) -> GroundTask:
        return self.base.rebind([self.base.atoms[i] for i in state], goal)

    def task_for(self, state: Iterable[int], tasks: Sequence[str]) -> GroundTask:
        return self.task(state, compose_goal(tasks, self.goal_map))

    def describe(self, state: Iterable[int]) -> list[str]:
        return self.base.describe(state)

    def holds(self, state: frozenset[int], text: str) -> bool:
        """Whether a fact given as ``(pred args)`` is true in ``state``."""
        atom = parse_literal(text).atom
        if atom in self.base.static_facts:
            return True
        idx = self.base.index.get(atom)
        return idx is not None and idx in state


def state_hash(world: World, state: Iterable[int]) -> str:
    return hashlib.sha256("\n".join(world.describe(state)).encode()).hexdigest()
