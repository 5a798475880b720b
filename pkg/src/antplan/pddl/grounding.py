"""Instantiate lifted schemas into a propositional task.

Static predicates (never added or deleted by any action) are evaluated against
the initial state while parameters are bound, so ground actions whose static
preconditions cannot hold are never produced. Static atoms are then dropped from
the ground task entirely; only fluent atoms get indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .ast import ActionSchema, Atom, DomainAst, Literal, ProblemAst
from .errors import GoalUsesUnknownObject, GroundingError


@dataclass(frozen=True, eq=False)
class GroundAction:
    name: str
    args: tuple[str, ...]
    pre_pos: frozenset[int]
    pre_neg: frozenset[int]
    add: frozenset[int]
    delete: frozenset[int]
    cost: int

    def __str__(self) -> str:
        return f"({' '.join((self.name,) + self.args)})"

    @property
    def key(self) -> tuple[str, ...]:
        return (self.name,) + self.args


@dataclass(frozen=True, eq=False)
class GroundTask:
    """Propositional planning task over a dense table of fluent atoms.

    Compared by identity; the planner caches compiled search data per instance.
    """

    atoms: tuple[Atom, ...]
    actions: tuple[GroundAction, ...]
    init: frozenset[int]
    goal_pos: frozenset[int]
    goal_neg: frozenset[int]
    static_facts: frozenset[Atom] = frozenset()
    objects: tuple[tuple[str, str], ...] = ()
    # positive goal atoms over statics that are false in init make the task unsolvable
    unsatisfiable_static_goal: bool = False
    index: dict[Atom, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.index:
            object.__setattr__(self, "index", {a: i for i, a in enumerate(self.atoms)})

    def atom_id(self, atom: Atom) -> int:
        return self.index[atom]

    def describe(self, ids: Iterable[int]) -> list[str]:
        return sorted(str(self.atoms[i]) for i in ids)

    def action_by_key(self) -> dict[tuple[str, ...], GroundAction]:
        return {a.key: a for a in self.actions}

    def goal_satisfied(self, atoms: frozenset[int] | set[int]) -> bool:
        return (not self.unsatisfiable_static_goal and self.goal_pos <= atoms
                and not (self.goal_neg & atoms))

    def rebind(self, init: Iterable[Atom], goal: Iterable[Literal]) -> "GroundTask":
        """Same atom and action tables with a different initial state and goal.

        ``init`` lists fluent atoms only. Valid whenever the new initial state is
        reachable from the state this task was grounded for, since grounding
        keeps every action whose static preconditions hold.
        """
        init_ids = set()
        for atom in init:
            if atom in self.static_facts:
                continue
            if atom not in self.index:
                raise GroundingError(f"initial atom {atom} is not in the atom table")
            init_ids.add(self.index[atom])
        pos, neg, bad_static = set(), set(), False
        for lit in goal:
            idx = self.index.get(lit.atom)
            if idx is None:
                holds_static = lit.atom in self.static_facts
                if lit.positive and not holds_static:
                    bad_static = True
                elif not lit.positive and holds_static:
                    bad_static = True
                continue
            (pos if lit.positive else neg).add(idx)
        return GroundTask(self.atoms, self.actions, frozenset(init_ids), frozenset(pos), frozenset(neg),
                          self.static_facts, self.objects, bad_static, self.index)


def _objects_by_type(domain: DomainAst, problem: ProblemAst) -> tuple[dict[str, list[str]], list[tuple[str, str]]]:
    pool = list(domain.constants) + list(problem.objects)
    typed = [(o.name, o.type) for o in pool]
    by_type: dict[str, list[str]] = {}
    all_types = {"object"} | {t.name for t in domain.types}
    for ty in all_types:
        subs = domain.subtypes(ty)
        by_type[ty] = [name for name, oty in typed if oty in subs]
    return by_type, typed


def _substitute(atom: Atom, binding: dict[str, str]) -> Atom:
    return Atom(atom.predicate, tuple(binding.get(a, a) for a in atom.args))


def _bindings(schema: ActionSchema, by_type: dict[str, list[str]], static_pos: list[Atom],
              static_neg: list[Atom], static_true: set[Atom]) -> Iterator[dict[str, str]]:
    params = schema.parameters
    # check each static precondition as soon as its last variable is bound
    checks: list[list[tuple[Atom, bool]]] = [[] for _ in params]
    pindex = {p.name: i for i, p in enumerate(params)}
    for atoms, positive in ((static_pos, True), (static_neg, False)):
        for atom in atoms:
            vars_ = [pindex[a] for a in atom.args if a in pindex]
            level = max(vars_) if vars_ else 0
            if not params:
                continue
            checks[level].append((atom, positive))
    ground_checks = [(a, True) for a in static_pos if not any(x in pindex for x in a.args)]
    ground_checks += [(a, False) for a in static_neg if not any(x in pindex for x in a.args)]
    for atom, positive in ground_checks:
        if (atom in static_true) != positive:
            return
    if not params:
        yield {}
        return

    binding: dict[str, str] = {}

    def rec(level: int) -> Iterator[dict[str, str]]:
        p = params[level]
        for obj in by_type.get(p.type, ()):
            binding[p.name] = obj
            ok = True
            for atom, positive in checks[level]:
                if (_substitute(atom, binding) in static_true) != positive:
                    ok = False
                    break
            if ok:
                if level + 1 == len(params):
                    yield dict(binding)
                else:
                    yield from rec(level + 1)
        binding.pop(p.name, None)

    yield from rec(0)


def ground(domain: DomainAst, problem: ProblemAst, prune_unreachable: bool = True) -> GroundTask:
    """Ground ``problem`` over ``domain`` into a :class:`GroundTask`.

    With ``prune_unreachable`` the action set is further restricted to actions
    reachable from init under the delete relaxation.
    """
    statics = domain.static_predicates
    by_type, typed_objects = _objects_by_type(domain, problem)
    known = {name for name, _ in typed_objects}
    for lit in problem.goal:
        for arg in lit.atom.args:
            if arg not in known:
                raise GoalUsesUnknownObject(f"goal {lit} mentions unknown object {arg!r}")

    static_true = {a for a in problem.init if a.predicate in statics}
    fluent_init = sorted({a for a in problem.init if a.predicate not in statics},
                         key=lambda a: (a.predicate, a.args))

    lifted: list[tuple[ActionSchema, dict[str, str]]] = []
    for schema in domain.actions:
        s_pos = [a for a in schema.pre_pos if a.predicate in statics]
        s_neg = [a for a in schema.pre_neg if a.predicate in statics]
        for b in _bindings(schema, by_type, s_pos, s_neg, static_true):
            lifted.append((schema, b))

    # fluent atom table: init first, then in order of appearance
    table: dict[Atom, int] = {}
    atoms: list[Atom] = []

    def idx(atom: Atom) -> int:
        i = table.get(atom)
        if i is None:
            i = table[atom] = len(atoms)
            atoms.append(atom)
        return i

    for a in fluent_init:
        idx(a)
    raw = []
    achievable: set[Atom] = set(fluent_init)
    for schema, b in lifted:
        for a in schema.add:
            achievable.add(_substitute(a, b))
    for schema, b in lifted:
        pre_pos = [_substitute(a, b) for a in schema.pre_pos if a.predicate not in statics]
        pre_neg = [_substitute(a, b) for a in schema.pre_neg if a.predicate not in statics]
        add = [_substitute(a, b) for a in schema.add]
        dele = [_substitute(a, b) for a in schema.delete]
        if any(a not in achievable for a in pre_pos):
            continue
        # contradictory preconditions: never applicable
        if set(pre_pos) & set(pre_neg):
            continue
        # negated atoms that can never become true are trivially satisfied
        pre_neg = [a for a in pre_neg if a in achievable]
        raw.append((schema, b, pre_pos, pre_neg, add, dele))

    if prune_unreachable:
        raw = _relaxed_reachable(raw, set(fluent_init))

    actions = []
    for schema, b, pre_pos, pre_neg, add, dele in raw:
        addset = frozenset(idx(a) for a in add)
        delset = frozenset(idx(a) for a in dele if a in achievable or a in table)
        if addset & delset:
            clash = ", ".join(str(atoms[i]) for i in sorted(addset & delset))
            raise GroundingError(
                f"action {schema.name}{tuple(b[p.name] for p in schema.parameters)} adds and deletes {clash}")
        actions.append(GroundAction(
            schema.name,
            tuple(b[p.name] for p in schema.parameters),
            frozenset(idx(a) for a in pre_pos),
            frozenset(idx(a) for a in pre_neg),
            addset,
            delset,
            schema.cost,
        ))

    goal_pos, goal_neg, bad_static = set(), set(), False
    for lit in problem.goal:
        atom = lit.atom
        if atom.predicate in statics:
            if (atom in static_true) != lit.positive:
                bad_static = True
            continue
        if lit.positive:
            goal_pos.add(idx(atom))
        elif atom in table:
            goal_neg.add(table[atom])
    init = frozenset(table[a] for a in fluent_init)
    return GroundTask(tuple(atoms), tuple(actions), init, frozenset(goal_pos), frozenset(goal_neg),
                      frozenset(static_true), tuple(typed_objects), bad_static)


def _relaxed_reachable(raw, init: set[Atom]):
    reached = set(init)
    remaining = list(raw)
    kept = []
    changed = True
    while changed:
        changed = False
        rest = []
        for item in remaining:
            if all(a in reached for a in item[2]):
                kept.append(item)
                for a in item[4]:
                    if a not in reached:
                        reached.add(a)
                        changed = True
            else:
                rest.append(item)
        remaining = rest
    order = {id(item): i for i, item in enumerate(raw)}
    kept.sort(key=lambda item: order[id(item)])
    return kept
