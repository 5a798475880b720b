"""Task-to-goal mapping and joint goal composition."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ..pddl.ast import Atom, Literal
from ..pddl.parser import SList, Token, read_sexpr
from ..task_model import Task

DATA = Path(__file__).parent / "data"


class GoalError(Exception):
    pass


class GoalConflict(GoalError):
    pass


class UnknownGoalKey(GoalError):
    pass


def parse_literal(text: str) -> Literal:
    """``(p a b)`` or ``(not (p a b))`` as a ground literal."""
    node = read_sexpr(text)
    positive = True
    if node.head() == "not":
        positive = False
        node = node[1]
    if not isinstance(node, SList) or not node.items or not all(isinstance(t, Token) for t in node.items):
        raise GoalError(f"not a ground literal: {text!r}")
    return Literal(Atom(node[0].value, tuple(t.value for t in node.items[1:])), positive)


@dataclass(frozen=True)
class TaskGoalMap:
    goals: dict[str, tuple[Literal, ...]]
    irreversible_actions: frozenset[str] = frozenset()
    restore_predicates: frozenset[str] = frozenset()

    def __contains__(self, key: str) -> bool:
        return key in self.goals

    def literals(self, key: str) -> tuple[Literal, ...]:
        try:
            return self.goals[key]
        except KeyError:
            raise UnknownGoalKey(f"no goal registered for {key!r}") from None


def load_goal_map(path: str | Path | None = None) -> TaskGoalMap:
    data = json.loads(Path(path or DATA / "goalmap.json").read_text())
    goals = {k: tuple(parse_literal(s) for s in v) for k, v in data["goals"].items()}
    return TaskGoalMap(goals, frozenset(data.get("irreversible_actions", ())),
                       frozenset(data.get("restore_predicates", ())))


def compose_goal(tasks: Iterable[str | Task], goal_map: TaskGoalMap) -> tuple[Literal, ...]:
    """Union of the tasks' goal literals, in task order without duplicates.

    Tasks are goal keys or :class:`Task` objects. A literal and its negation
    demanded by different tasks raise :class:`GoalConflict`.
    """
    out: list[Literal] = []
    owner: dict[Literal, str] = {}
    for task in tasks:
        key = task.goal_key if isinstance(task, Task) else task
        name = task.id if isinstance(task, Task) else task
        for lit in goal_map.literals(key):
            clash = owner.get(lit.negate())
            if clash is not None:
                raise GoalConflict(f"tasks {clash!r} and {name!r} disagree on {lit.atom}")
            if lit not in owner:
                owner[lit] = name
                out.append(lit)
    return tuple(out)


def goal_tasks_by_literal(tasks: Sequence[str], goal_map: TaskGoalMap) -> dict[Literal, str]:
    return {lit: t for t in tasks for lit in goal_map.literals(t)}
