"""STRIPS state transition semantics, plans, and the independent plan validator."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import NotApplicable, ParseError
from .grounding import GroundAction, GroundTask


@dataclass(frozen=True)
class State:
    atoms: frozenset[int]
    cost: int = 0

    @classmethod
    def initial(cls, task: GroundTask) -> "State":
        return cls(task.init, 0)


def applicable(state: State, action: GroundAction) -> bool:
    return action.pre_pos <= state.atoms and not (action.pre_neg & state.atoms)


def apply(state: State, action: GroundAction) -> State:
    """Successor of ``state`` under ``action``: deletes first, then adds."""
    if not applicable(state, action):
        raise NotApplicable(f"{action} is not applicable")
    return State((state.atoms - action.delete) | action.add, state.cost + action.cost)


@dataclass(frozen=True)
class Plan:
    actions: tuple[GroundAction, ...] = ()

    @property
    def cost(self) -> int:
        return sum(a.cost for a in self.actions)

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)


@dataclass
class ValidationReport:
    valid: bool
    cost: int
    steps_executed: int
    failed_step: int | None = None
    reason: str = ""
    final_atoms: frozenset[int] = field(default_factory=frozenset)

    def __bool__(self) -> bool:
        return self.valid


def validate(plan: Plan, task: GroundTask) -> ValidationReport:
    """Replay ``plan`` from the initial state and check the goal.

    Works on plain set operations over the ground task; it shares nothing with
    the search code beyond the task itself.
    """
    atoms = set(task.init)
    cost = 0
    for step, act in enumerate(plan.actions):
        missing = act.pre_pos - atoms
        blocked = act.pre_neg & atoms
        if missing or blocked:
            why = []
            if missing:
                why.append("missing " + ", ".join(task.describe(missing)))
            if blocked:
                why.append("negated precondition holds: " + ", ".join(task.describe(blocked)))
            return ValidationReport(False, cost, step, step, f"step {step} {act}: " + "; ".join(why),
                                    frozenset(atoms))
        atoms -= act.delete
        atoms |= act.add
        cost += act.cost
    final = frozenset(atoms)
    if task.unsatisfiable_static_goal:
        return ValidationReport(False, cost, len(plan), None, "goal requires a static fact that is false", final)
    unmet = task.goal_pos - atoms
    violated = task.goal_neg & atoms
    if unmet or violated:
        parts = []
        if unmet:
            parts.append("unsatisfied " + ", ".join(task.describe(unmet)))
        if violated:
            parts.append("should be false " + ", ".join(task.describe(violated)))
        return ValidationReport(False, cost, len(plan), None, "goal not reached: " + "; ".join(parts), final)
    return ValidationReport(True, cost, len(plan), None, "", final)


def format_plan(plan: Plan) -> str:
    lines = [str(a) for a in plan.actions]
    lines.append(f"; cost = {plan.cost}")
    return "\n".join(lines) + "\n"


_STEP = re.compile(r"^\(\s*([^()\s]+)((?:\s+[^()\s]+)*)\s*\)$")


def parse_plan(text: str, task: GroundTask) -> Plan:
    """Read the one-action-per-line plan format, resolving each step in ``task``."""
    lookup = task.action_by_key()
    steps = []
    declared_cost = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(";"):
            m = re.match(r";\s*cost\s*=\s*(\d+)", line)
            if m:
                declared_cost = int(m.group(1))
            continue
        m = _STEP.match(line)
        if not m:
            raise ParseError(f"malformed plan step {line!r}", lineno, 1)
        key = (m.group(1).lower(),) + tuple(m.group(2).lower().split())
        act = lookup.get(key)
        if act is None:
            raise ParseError(f"unknown ground action {line!r}", lineno, 1)
        steps.append(act)
    plan = Plan(tuple(steps))
    if declared_cost is not None and declared_cost != plan.cost:
        raise ParseError(f"plan declares cost {declared_cost} but its actions sum to {plan.cost}")
    return plan
