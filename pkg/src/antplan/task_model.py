"""Task catalog, activities, and order-preserving routine sampling."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


class TaskModelError(Exception):
    pass


class CatalogParseError(TaskModelError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"{message} (line {line})" if line is not None else message)


class DuplicateTask(TaskModelError):
    pass


class LengthTooLarge(TaskModelError):
    pass


@dataclass(frozen=True)
class Task:
    id: str
    activity: str
    rank_in_activity: int
    goal_key: str


@dataclass(frozen=True)
class Activity:
    name: str
    tasks: tuple[str, ...]


@dataclass(frozen=True)
class Routine:
    tasks: tuple[str, ...]
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.tasks)

    def __iter__(self):
        return iter(self.tasks)


@dataclass(frozen=True)
class TaskCatalog:
    activities: tuple[Activity, ...]
    all_tasks: dict[str, Task] = field(compare=False)

    @classmethod
    def from_activities(cls, activities: Iterable[tuple[str, Sequence[tuple[str, str]]]]) -> "TaskCatalog":
        """Build from ``[(activity, [(task_id, goal_key), ...]), ...]``."""
        acts, tasks = [], {}
        for name, entries in activities:
            ids = []
            for rank, (tid, goal_key) in enumerate(entries):
                if tid in tasks:
                    raise DuplicateTask(f"task {tid!r} appears in both {tasks[tid].activity!r} and {name!r}")
                tasks[tid] = Task(tid, name, rank, goal_key)
                ids.append(tid)
            acts.append(Activity(name, tuple(ids)))
        return cls(tuple(acts), tasks)

    def __len__(self) -> int:
        return len(self.all_tasks)

    def __contains__(self, task_id: str) -> bool:
        return task_id in self.all_tasks

    @property
    def task_ids(self) -> list[str]:
        """Catalog tasks in a stable order: activity by activity."""
        return [t for a in self.activities for t in a.tasks]

    def activity_of(self, task_id: str) -> Activity:
        name = self.all_tasks[task_id].activity
        return next(a for a in self.activities if a.name == name)

    def to_json(self) -> dict:
        return {
            "activities": [
                {"name": a.name,
                 "tasks": [{"id": t, "goal_key": self.all_tasks[t].goal_key} for t in a.tasks]}
                for a in self.activities
            ]
        }

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json(), indent=indent)


def _line_of(text: str, needle: str) -> int | None:
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def parse_catalog(text: str) -> TaskCatalog:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogParseError(f"invalid JSON: {exc.msg}", exc.lineno) from exc
    if not isinstance(data, dict) or not isinstance(data.get("activities"), list):
        raise CatalogParseError("top level must be an object with an 'activities' list", 1)
    entries = []
    for a in data["activities"]:
        if not isinstance(a, dict) or not isinstance(a.get("name"), str) or not isinstance(a.get("tasks"), list):
            raise CatalogParseError("each activity needs a string 'name' and a 'tasks' list",
                                    _line_of(text, json.dumps(a.get("name"))) if isinstance(a, dict) else None)
        tasks = []
        for t in a["tasks"]:
            if not isinstance(t, dict) or not isinstance(t.get("id"), str) or not t["id"]:
                raise CatalogParseError(f"activity {a['name']!r}: each task needs a non-empty string 'id'",
                                        _line_of(text, json.dumps(a["name"])))
            goal_key = t.get("goal_key", t["id"])
            if not isinstance(goal_key, str) or not goal_key:
                raise CatalogParseError(f"task {t['id']!r}: goal_key must be a non-empty string",
                                        _line_of(text, json.dumps(t["id"])))
            tasks.append((t["id"], goal_key))
        entries.append((a["name"], tasks))
    names = [name for name, _ in entries]
    if len(set(names)) != len(names):
        raise CatalogParseError("activity names must be unique")
    return TaskCatalog.from_activities(entries)


def load_catalog(path: str | Path) -> TaskCatalog:
    return parse_catalog(Path(path).read_text())


def bundled_catalog_path() -> Path:
    return Path(__file__).parent / "household" / "data" / "catalog.json"


def bundled_catalog() -> TaskCatalog:
    return load_catalog(bundled_catalog_path())


def sample_routine(catalog: TaskCatalog, length: int = 20, seed: int | None = None) -> Routine:
    """Randomly interleave per-activity prefixes into a routine of ``length`` tasks.

    Each step picks a non-exhausted activity with probability proportional to the
    number of tasks it has left, then emits that activity's next task.
    """
    if length < 0:
        raise ValueError("length must be non-negative")
    if length > len(catalog):
        raise LengthTooLarge(f"routine of {length} tasks requested from a catalog of {len(catalog)}")
    rng = random.Random(seed)
    cursors = {a.name: 0 for a in catalog.activities}
    by_name = {a.name: a for a in catalog.activities}
    out: list[str] = []
    while len(out) < length:
        names = [a.name for a in catalog.activities if cursors[a.name] < len(a.tasks)]
        weights = [len(by_name[n].tasks) - cursors[n] for n in names]
        pick = rng.choices(names, weights=weights)[0]
        out.append(by_name[pick].tasks[cursors[pick]])
        cursors[pick] += 1
    return Routine(tuple(out), seed)


def remainder(routine: Routine | Sequence[str], prefix_len: int) -> list[str]:
    tasks = routine.tasks if isinstance(routine, Routine) else tuple(routine)
    if not 0 <= prefix_len <= len(tasks):
        raise ValueError(f"prefix_len {prefix_len} outside 0..{len(tasks)}")
    return list(tasks[prefix_len:])


def respects_activity_order(catalog: TaskCatalog, tasks: Sequence[str]) -> bool:
    """True when no task repeats and same-activity tasks keep their catalog order."""
    if len(set(tasks)) != len(tasks):
        return False
    last: dict[str, int] = {}
    for t in tasks:
        task = catalog.all_tasks[t]
        if task.rank_in_activity <= last.get(task.activity, -1):
            return False
        last[task.activity] = task.rank_in_activity
    return True
