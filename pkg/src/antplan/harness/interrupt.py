"""Mid-plan interrupts: snapshot, re-anticipate, restore, replan."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from ..anticipation import Anticipator, PromptContext, ScriptedAnticipator
from ..household import ScenarioSpec, compose_goal
from ..pddl import Atom, GroundAction, Literal, Plan, State, apply, validate
from ..planner import SearchConfig, plan
from ..task_model import Routine, TaskCatalog, bundled_catalog
from .world import World


class ReplanFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class InterruptEvent:
    """Interrupt after ``step`` actions of the first batch plan, or right after ``after_action``."""

    note: str
    step: int | None = None
    after_action: str | None = None

    def resolve(self, p: Plan) -> int:
        if self.after_action is not None:
            for i, a in enumerate(p.actions):
                if a.name == self.after_action:
                    return i + 1
            raise ValueError(f"first batch plan never executes {self.after_action!r}")
        if self.step is None or not 0 <= self.step <= len(p):
            raise ValueError(f"interrupt step {self.step} outside the first plan (length {len(p)})")
        return self.step


@dataclass
class InterruptTranscript:
    routine: tuple[str, ...]
    first_batch: tuple[str, ...]
    first_plan: list[str]
    step: int
    executed: list[str]
    note: str
    state_summary: dict
    revised_routine: tuple[str, ...]
    restore_goals: list[str]
    irreversible_effects: list[str]
    replans: list[dict] = field(default_factory=list)
    final_facts: list[str] = field(default_factory=list)
    revised_goal: list[str] = field(default_factory=list)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def state_summary(world: World, atoms: frozenset[int]) -> dict:
    """True fluents grouped by the room they concern, as compact JSON-ready data."""
    layout_rooms = {o.name for o in world.scenario.objects if o.type == "location"}
    recep_room = {f.args[0]: f.args[1] for f in world.base.static_facts if f.predicate == "recep_at"}
    facts = [world.base.atoms[i] for i in atoms]
    obj_room = {f.args[0]: f.args[1] for f in facts if f.predicate == "obj_at"}
    out: dict[str, list[str]] = {}
    agent = None
    for f in sorted(facts, key=lambda a: (a.predicate, a.args)):
        if f.predicate == "agent_at":
            agent = f.args[0]
            continue
        if f.predicate in ("obj_at", "hands"):
            continue
        room = next((a for a in f.args if a in layout_rooms), None)
        room = room or next((recep_room[a] for a in f.args if a in recep_room), None)
        room = room or next((obj_room[a] for a in f.args if a in obj_room), None)
        out.setdefault(room or "with_agent", []).append(str(f))
    return {"agent_at": agent, "facts_by_room": out}


def restore_goals(world: World, before: frozenset[int], now: frozenset[int], revised: Sequence[Literal],
                  keep: set[Atom]) -> list[Literal]:
    """Literals undoing changes to restorable predicates since ``before``.

    Changes caused by irreversible actions (``keep``) and atoms whose subject the
    revised goal already constrains through the same predicate are left alone.
    """
    restorable = world.goal_map.restore_predicates
    constrained = {(lit.atom.predicate, lit.atom.args[0]) for lit in revised if lit.atom.args}
    out = []
    for i in sorted(before ^ now, key=lambda i: str(world.base.atoms[i])):
        atom = world.base.atoms[i]
        if atom.predicate not in restorable or atom in keep:
            continue
        if atom.args and (atom.predicate, atom.args[0]) in constrained:
            continue
        out.append(Literal(atom, i in before))
    return out


def _plan_batches(world: World, state: State, tasks: Sequence[str], extra: Sequence[Literal], k: int,
                  cfg: SearchConfig, time_unit: float, transcript: InterruptTranscript) -> State:
    batches = [list(tasks[i:i + k + 1]) for i in range(0, len(tasks), k + 1)] or [[]]
    for n, batch in enumerate(batches):
        goal = list(compose_goal(batch, world.goal_map))
        if n == 0:
            goal += [lit for lit in extra if lit not in goal]
        task = world.task(state.atoms, goal)
        deadline = max(len(batch), 1) * time_unit
        result = plan(task, replace(cfg, deadline=deadline), world.compiled)
        if result.plan is None:
            raise ReplanFailed(f"no plan for revised batch {batch}"
                               + (" (unsolvable)" if result.unsolvable else " before the deadline"))
        if not validate(result.plan, task):
            raise ReplanFailed(f"invalid replan for {batch}")
        for a in result.plan:
            state = apply(state, a)
        transcript.replans.append({"tasks": batch, "goal": [str(g) for g in goal],
                                   "plan": [str(a) for a in result.plan], "cost": result.plan.cost})
    return state


def run_interrupt_demo(routine: Routine | Sequence[str], k: int, interrupt: InterruptEvent,
                       anticipator: Anticipator, *, scenario: ScenarioSpec | None = None,
                       cfg: SearchConfig | None = None, time_unit: float = 2.0, world: World | None = None,
                       catalog: TaskCatalog | None = None) -> InterruptTranscript:
    """Execute the first batch up to the interrupt, then follow the revised routine.

    The anticipator sees the house state and the user's note and returns the
    tasks still wanted. Restorable facts changed during the interrupted batch
    are put back unless an irreversible action produced them or the revised
    goal says otherwise.
    """
    tasks = tuple(routine.tasks if isinstance(routine, Routine) else routine)
    world = world or World.create(scenario)
    catalog = catalog or bundled_catalog()
    cfg = cfg or SearchConfig(deadline=time_unit)
    irreversible = world.goal_map.irreversible_actions

    batch = list(tasks[:k + 1])
    state = State(world.init)
    task = world.task_for(state.atoms, batch)
    first = plan(task, replace(cfg, deadline=len(batch) * time_unit), world.compiled)
    if first.plan is None:
        raise ReplanFailed(f"no plan for the first batch {batch}")
    step = interrupt.resolve(first.plan)
    before = state.atoms
    executed: list[GroundAction] = list(first.plan.actions[:step])
    for a in executed:
        state = apply(state, a)
    keep_ids = {i for a in executed if a.name in irreversible for i in a.add}
    keep = {world.base.atoms[i] for i in keep_ids}

    summary = state_summary(world, state.atoms)
    ctx = PromptContext(catalog, (), (), constraint_note=interrupt.note, state_summary=summary)
    revised = tuple(t for t in anticipator.anticipate(ctx).tasks if t in catalog)
    revised_goal = list(compose_goal(revised, world.goal_map))
    restore = restore_goals(world, before, state.atoms, revised_goal, keep)

    transcript = InterruptTranscript(tasks, tuple(batch), [str(a) for a in first.plan], step,
                                     [str(a) for a in executed], interrupt.note, summary, revised,
                                     [str(l) for l in restore], sorted(str(a) for a in keep))
    atoms = _plan_batches(world, state, revised, restore, k, cfg, time_unit, transcript).atoms

    def holds(lit: Literal) -> bool:
        return (world.base.index.get(lit.atom) in atoms) == lit.positive

    transcript.final_facts = world.describe(atoms)
    transcript.revised_goal = [str(l) for l in revised_goal]
    transcript.checks = {
        "revised_goals_hold": all(holds(l) for l in revised_goal),
        "reversible_effects_undone": all(holds(l) for l in restore),
        "irreversible_effects_retained": all(i in atoms for i in keep_ids),
    }
    return transcript


@dataclass(frozen=True)
class InterruptScript:
    routine: tuple[str, ...]
    k: int
    event: InterruptEvent
    revised: tuple[str, ...]
    seed: int | None = None


def load_script(path: str | Path) -> InterruptScript:
    """JSON with keys routine, k, note, revised and one of step / after_action; seed optional."""
    d = json.loads(Path(path).read_text())
    event = InterruptEvent(d["note"], d.get("step"), d.get("after_action"))
    return InterruptScript(tuple(d["routine"]), int(d.get("k", 0)), event, tuple(d["revised"]), d.get("seed"))


def bundled_script_path() -> Path:
    return Path(__file__).resolve().parent.parent / "household" / "data" / "interrupt_cancel_breakfast.json"


def run_script(script: InterruptScript, cfg: SearchConfig | None = None, time_unit: float = 2.0) -> InterruptTranscript:
    return run_interrupt_demo(script.routine, script.k, script.event, ScriptedAnticipator(script.revised),
                              scenario=ScenarioSpec(seed=script.seed), cfg=cfg, time_unit=time_unit)
