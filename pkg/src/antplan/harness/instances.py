"""Small household planning instances built from reduced object rosters."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from ..household import ScenarioSpec, load_layout
from ..pddl import GroundTask
from ..planner import SearchConfig, plan
from ..task_model import TaskCatalog, bundled_catalog
from .world import World


def task_roster(world: World, goal_key: str, cfg: SearchConfig | None = None) -> tuple[str, ...]:
    """Layout objects that some plan for ``goal_key`` touches, plus those in its goal.

    A scenario holding only these objects still admits that plan, so the
    reduced instance stays solvable under any placement seed.
    """
    objects = load_layout(world.scenario.spec.layout_path).objects
    cfg = cfg or SearchConfig(deadline=30.0, max_expansions=1500)
    result = plan(world.task_for(world.init, [goal_key]), cfg, world.compiled)
    if result.plan is None:
        raise ValueError(f"no plan for {goal_key!r} in the full scenario")
    used = {a for act in result.plan for a in act.args if a in objects}
    # constants appear in schemas, not in ground action arguments
    for name in {act.name for act in result.plan}:
        schema = world.domain.action(name)
        atoms = schema.pre_pos + schema.pre_neg + schema.add + schema.delete
        used |= {a for atom in atoms for a in atom.args if a in objects}
    used |= {a for lit in world.goal_map.literals(goal_key) for a in lit.atom.args if a in objects}
    return tuple(sorted(used))


def task_rosters(catalog: TaskCatalog | None = None, world: World | None = None) -> dict[str, tuple[str, ...]]:
    """Roster per goal key of every catalog task."""
    catalog = catalog or bundled_catalog()
    world = world or World.create()
    keys = dict.fromkeys(catalog.all_tasks[t].goal_key for t in catalog.task_ids)
    return {k: task_roster(world, k) for k in keys}


@dataclass
class Instance:
    tasks: tuple[str, ...]
    seed: int
    world: World
    task: GroundTask


def random_instances(n: int, rosters: dict[str, tuple[str, ...]], *, seed: int = 0,
                     sizes: Sequence[int] = (1, 2)) -> list[Instance]:
    """``n`` instances, each a random goal-key subset on a randomly seeded reduced scenario."""
    rng = random.Random(seed)
    ids = sorted(rosters)
    out = []
    for _ in range(n):
        tasks = tuple(rng.sample(ids, rng.choice(list(sizes))))
        s = rng.randrange(1 << 20)
        objs = tuple(sorted(set().union(*(rosters[t] for t in tasks))))
        world = World.create(ScenarioSpec(seed=s, objects=objs))
        out.append(Instance(tasks, s, world, world.task_for(world.init, tasks)))
    return out
