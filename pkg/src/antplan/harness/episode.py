"""Myopic versus anticipatory execution of a routine, batch by batch."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from ..anticipation import Anticipator, OracleAnticipator, PromptContext
from ..household import ScenarioSpec
from ..pddl import Plan, State, apply, validate
from ..planner import SearchConfig, plan
from ..task_model import Routine, TaskCatalog, bundled_catalog, sample_routine
from .world import World, state_hash

REANTICIPATE = ("once", "per_batch")


class PlanningFailed(RuntimeError):
    def __init__(self, message: str, episode: "Episode", batch_index: int):
        super().__init__(message)
        self.episode = episode
        self.batch_index = batch_index


@dataclass(frozen=True)
class BatchRecord:
    index: int
    tasks: tuple[str, ...]
    plan: Plan
    cost: int
    planning_time: float
    deadline: float
    proven_optimal: bool


@dataclass
class Episode:
    routine: Routine
    k: int
    scenario: ScenarioSpec
    init_hash: str
    batches: list[BatchRecord] = field(default_factory=list)
    failed: bool = False
    failed_batch: int | None = None
    final_state: frozenset[int] = frozenset()

    @property
    def plan_length(self) -> int:
        return sum(len(b.plan) for b in self.batches)

    @property
    def execution_cost(self) -> int:
        return sum(b.cost for b in self.batches)

    @property
    def planning_time(self) -> float:
        return sum(b.planning_time for b in self.batches)

    @property
    def trace(self) -> Plan:
        return Plan(tuple(a for b in self.batches for a in b.plan))

    @property
    def completed(self) -> list[str]:
        return [t for b in self.batches for t in b.tasks]


def _next_batch(routine: Sequence[str], cursor: int, done: set[str], predicted: Sequence[str], k: int) -> list[str]:
    current = routine[cursor]
    batch = [current]
    for t in predicted:
        if len(batch) > k:
            break
        if t not in done and t not in batch:
            batch.append(t)
    return batch


def run_episode(routine: Routine | Sequence[str], k: int, scenario: ScenarioSpec | None = None,
                anticipator: Anticipator | None = None, cfg: SearchConfig | None = None, *,
                time_unit: float = 2.0, world: World | None = None, catalog: TaskCatalog | None = None,
                example_routines: Sequence[Routine] = (), reanticipate: str = "once") -> Episode:
    """Plan and execute ``routine`` with ``k`` anticipated tasks folded into every batch.

    Each batch is the current task plus up to ``k`` not-yet-done anticipated
    tasks; its plan gets ``len(batch) * time_unit`` seconds and is executed in
    full before moving on to the next unfinished routine task. With an oracle
    anticipator the batches partition the routine in order.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if reanticipate not in REANTICIPATE:
        raise ValueError(f"reanticipate must be one of {REANTICIPATE}")
    routine = routine if isinstance(routine, Routine) else Routine(tuple(routine))
    tasks = routine.tasks
    scenario = scenario or ScenarioSpec()
    world = world or World.create(scenario)
    catalog = catalog or bundled_catalog()
    anticipator = anticipator or OracleAnticipator(routine)
    cfg = cfg or SearchConfig(deadline=time_unit)

    episode = Episode(routine, k, scenario, state_hash(world, world.init))
    state = State(world.init)
    done: set[str] = set()
    cursor = 0
    predicted: tuple[str, ...] = ()

    def anticipate(prefix_len: int) -> tuple[str, ...]:
        ctx = PromptContext(catalog, tuple(example_routines), tuple(tasks[:prefix_len]))
        return anticipator.anticipate(ctx).tasks

    if k > 0 and tasks:
        predicted = anticipate(1)
    while cursor < len(tasks):
        if k > 0 and reanticipate == "per_batch" and cursor > 0:
            predicted = anticipate(cursor + 1)
        batch = _next_batch(tasks, cursor, done, predicted, k)
        deadline = len(batch) * time_unit
        task = world.task_for(state.atoms, batch)
        result = plan(task, replace(cfg, deadline=deadline), world.compiled)
        index = len(episode.batches)
        if result.plan is None:
            episode.failed = True
            episode.failed_batch = index
            episode.final_state = state.atoms
            why = "unsolvable" if result.unsolvable else "no plan before the deadline"
            raise PlanningFailed(f"batch {index} {batch}: {why}", episode, index)
        report = validate(result.plan, task)
        if not report.valid:
            raise AssertionError(f"planner returned an invalid plan for batch {index}: {report.reason}")
        for act in result.plan:
            state = apply(state, act)
        assert task.goal_satisfied(state.atoms)
        episode.batches.append(BatchRecord(index, tuple(batch), result.plan, result.plan.cost, result.elapsed,
                                           deadline, result.proven_optimal))
        done.update(batch)
        while cursor < len(tasks) and tasks[cursor] in done:
            cursor += 1
    episode.final_state = state.atoms
    return episode


@dataclass
class PairedTrial:
    trial: int
    seed: int
    routine: Routine
    scenario: ScenarioSpec
    episodes: dict[int, Episode]
    failures: dict[int, str] = field(default_factory=dict)

    def ratio(self, k: int) -> tuple[float, float]:
        """(cost_k / cost_0, length_k / length_0)."""
        base, ep = self.episodes[0], self.episodes[k]
        if ep is base:
            return 1.0, 1.0
        return ep.execution_cost / base.execution_cost, ep.plan_length / base.plan_length


def run_paired_trial(trial: int, routine: Routine, scenario: ScenarioSpec, ks: Sequence[int],
                     cfg: SearchConfig | None = None, *, time_unit: float = 2.0,
                     anticipator_factory: Callable[[Routine], Anticipator] = OracleAnticipator,
                     reanticipate: str = "once") -> PairedTrial:
    """Every k runs from the same world, so initial states match bit for bit."""
    ks = sorted(set(ks) | {0})
    world = World.create(scenario)
    episodes: dict[int, Episode] = {}
    failures: dict[int, str] = {}
    for k in ks:
        try:
            episodes[k] = run_episode(routine, k, scenario, anticipator_factory(routine), cfg,
                                      time_unit=time_unit, world=world, reanticipate=reanticipate)
        except PlanningFailed as exc:
            failures[k] = str(exc)
    return PairedTrial(trial, scenario.seed if scenario.seed is not None else -1, routine, scenario,
                       episodes, failures)


def run_planning_experiment(reps: int = 10, ks: Sequence[int] = (0, 1, 3, 6), *, time_unit: float = 2.0,
                            routine_length: int = 10, seed: int = 0, cfg: SearchConfig | None = None,
                            catalog: TaskCatalog | None = None, reanticipate: str = "once",
                            progress: Callable[[PairedTrial], None] | None = None) -> list[PairedTrial]:
    """Paired myopic-versus-anticipatory trials with the oracle anticipator.

    Repetition ``i`` uses seed ``seed + i`` for both the routine and the
    object placement.
    """
    catalog = catalog or bundled_catalog()
    trials = []
    for i in range(reps):
        s = seed + i
        routine = sample_routine(catalog, routine_length, s)
        trial = run_paired_trial(i, routine, ScenarioSpec(seed=s), ks, cfg, time_unit=time_unit,
                                 reanticipate=reanticipate)
        trials.append(trial)
        if progress:
            progress(trial)
    return trials
