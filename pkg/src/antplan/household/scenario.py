"""House layout, seeded scenario generation and problem synthesis."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from ..pddl.ast import Atom, DomainAst, Literal, ProblemAst, TypedName
from ..pddl.parser import parse_domain
from ..pddl.printer import format_problem

DATA = Path(__file__).parent / "data"
COUNTS = ("n0", "n1", "n2")


@lru_cache(maxsize=4)
def _domain_cached(path: str) -> DomainAst:
    return parse_domain(Path(path).read_text())


def load_domain(path: str | Path | None = None) -> DomainAst:
    """Parsed household domain (bundled copy by default); cached per path."""
    return _domain_cached(str(Path(path or DATA / "domain.pddl").resolve()))


def domain_text() -> str:
    return (DATA / "domain.pddl").read_text()


@dataclass(frozen=True)
class Layout:
    rooms: tuple[str, ...]
    outdoor: frozenset[str]
    connections: tuple[tuple[str, str], ...]
    agent_start: str
    receptacles: dict[str, dict]
    objects: dict[str, dict]
    randomize: dict = field(default_factory=dict)
    constraint_scenarios: dict = field(default_factory=dict)

    def room_of(self, receptacle: str) -> str:
        return self.receptacles[receptacle]["room"]


@lru_cache(maxsize=4)
def _layout_cached(path: str) -> Layout:
    d = json.loads(Path(path).read_text())
    return Layout(tuple(d["rooms"]), frozenset(d.get("outdoor", ())),
                  tuple(tuple(c) for c in d["connections"]), d["agent_start"], d["receptacles"],
                  d["objects"], d.get("randomize", {}), d.get("constraint_scenarios", {}))


def load_layout(path: str | Path | None = None) -> Layout:
    return _layout_cached(str(Path(path or DATA / "scenario.json").resolve()))


@dataclass(frozen=True)
class ScenarioSpec:
    """What varies between scenarios: placement seed, object roster, init overrides.

    ``seed=None`` is the canonical layout. ``objects=None`` keeps every object;
    otherwise only the listed objects get initial facts.
    """

    seed: int | None = None
    objects: tuple[str, ...] | None = None
    add: tuple[Atom, ...] = ()
    remove: tuple[Atom, ...] = ()
    layout_path: str | None = None


@dataclass(frozen=True)
class Scenario:
    spec: ScenarioSpec
    objects: tuple[TypedName, ...]  # problem objects; domain constants excluded
    init: tuple[Atom, ...]  # sorted
    agent_start: str
    placements: dict[str, str]  # object -> receptacle or room


def build_scenario(spec: ScenarioSpec | None = None, domain: DomainAst | None = None) -> Scenario:
    spec = spec or ScenarioSpec()
    layout = load_layout(spec.layout_path)
    domain = domain or load_domain()
    constants = {c.name for c in domain.constants}
    roster = list(layout.objects) if spec.objects is None else list(spec.objects)
    unknown = [o for o in roster if o not in layout.objects]
    if unknown:
        raise KeyError(f"objects not in the layout: {', '.join(unknown)}")

    start = layout.agent_start
    where = {o: layout.objects[o].get("in") or layout.objects[o].get("at") for o in layout.objects}
    if spec.seed is not None:
        rng = random.Random(spec.seed)
        start = rng.choice(layout.randomize.get("agent_start", [start]))
        for obj, options in sorted(layout.randomize.get("placements", {}).items()):
            choice = rng.choice(options)
            if layout.objects[obj].get("in"):
                where[obj] = choice

    init: set[Atom] = {Atom("agent_at", (start,)), Atom("hands", ("n0",)),
                       Atom("next", ("n0", "n1")), Atom("next", ("n1", "n2"))}
    for a, b in layout.connections:
        init.add(Atom("connected", (a, b)))
        init.add(Atom("connected", (b, a)))
    for room in layout.rooms:
        init.add(Atom("outdoor" if room in layout.outdoor else "indoor", (room,)))
    for r, info in layout.receptacles.items():
        init.add(Atom("recep_at", (r, info["room"])))
        if info.get("openable"):
            init.add(Atom("openable", (r,)))
        else:
            init.add(Atom("accessible", (r,)))
        for role in info.get("roles", ()):
            init.add(Atom(role, (r,)))
    for o in roster:
        info = layout.objects[o]
        if info.get("in"):
            r = where[o]
            init.add(Atom("obj_in", (o, r)))
            init.add(Atom("obj_at", (o, layout.room_of(r))))
        else:
            init.add(Atom("obj_at", (o, where[o])))
        for prop in info.get("props", ()):
            init.add(Atom(prop, (o,)))
    init -= set(spec.remove)
    init |= set(spec.add)

    objects = [TypedName(r, "location") for r in layout.rooms]
    objects += [TypedName(r, "receptacle") for r in layout.receptacles]
    objects += [TypedName(c, "count") for c in COUNTS]
    objects += [TypedName(o, layout.objects[o]["type"]) for o in layout.objects if o not in constants]
    return Scenario(spec, tuple(objects), tuple(sorted(init, key=lambda a: (a.predicate, a.args))), start,
                    {o: where[o] for o in roster})


def canonical_scenario() -> Scenario:
    return build_scenario(ScenarioSpec())


def problem_ast(scenario: Scenario, goal: Iterable[Literal], name: str = "household-task",
                init: Sequence[Atom] | None = None) -> ProblemAst:
    """Problem over the household domain; ``init`` replaces the scenario's initial facts."""
    atoms = scenario.init if init is None else tuple(sorted(init, key=lambda a: (a.predicate, a.args)))
    return ProblemAst(name, "household", scenario.objects, atoms, tuple(goal), metric=True)


def synthesize_problem(scenario: Scenario, goal: Iterable[Literal], name: str = "household-task",
                       init: Sequence[Atom] | None = None) -> str:
    """Problem file text; the same inputs always give the same bytes."""
    spec = scenario.spec
    header = f"scenario seed={spec.seed}" if spec.seed is not None else "canonical scenario"
    return format_problem(problem_ast(scenario, goal, name, init), header=header)
