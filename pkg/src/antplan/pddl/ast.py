"""Immutable syntax trees for the STRIPS subset of PDDL we support.

All names are lower-cased by the lexer, so two ASTs compare equal exactly when
they describe the same domain or problem up to letter case and whitespace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

ROOT_TYPE = "object"


@dataclass(frozen=True)
class TypedName:
    name: str
    type: str = ROOT_TYPE


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return f"({self.predicate})"
        return f"({self.predicate} {' '.join(self.args)})"

    @property
    def is_ground(self) -> bool:
        return not any(a.startswith("?") for a in self.args)


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"(not {self.atom})"

    def negate(self) -> "Literal":
        return Literal(self.atom, not self.positive)


@dataclass(frozen=True)
class PredicateDef:
    name: str
    params: tuple[TypedName, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    parameters: tuple[TypedName, ...]
    pre_pos: tuple[Atom, ...]
    pre_neg: tuple[Atom, ...]
    add: tuple[Atom, ...]
    delete: tuple[Atom, ...]
    cost: int = 1
    # False when the source had no (increase (total-cost) N); cost then defaults to 1
    explicit_cost: bool = False


@dataclass(frozen=True)
class DomainAst:
    name: str
    requirements: tuple[str, ...]
    types: tuple[TypedName, ...]  # (type, parent type)
    constants: tuple[TypedName, ...]
    predicates: tuple[PredicateDef, ...]
    actions: tuple[ActionSchema, ...]
    has_total_cost: bool = False

    def predicate(self, name: str) -> PredicateDef | None:
        for p in self.predicates:
            if p.name == name:
                return p
        return None

    def action(self, name: str) -> ActionSchema:
        for a in self.actions:
            if a.name == name:
                return a
        raise KeyError(name)

    @property
    def type_parents(self) -> dict[str, str]:
        return {t.name: t.type for t in self.types}

    def subtypes(self, type_name: str) -> set[str]:
        """All types equal to or below ``type_name`` in the hierarchy."""
        children: dict[str, list[str]] = {}
        for t in self.types:
            children.setdefault(t.type, []).append(t.name)
        out, stack = set(), [type_name]
        while stack:
            t = stack.pop()
            if t in out:
                continue
            out.add(t)
            stack.extend(children.get(t, ()))
        return out

    def is_subtype(self, sub: str, sup: str) -> bool:
        parents = self.type_parents
        seen = set()
        while sub not in seen:
            if sub == sup:
                return True
            seen.add(sub)
            if sub == ROOT_TYPE or sub not in parents:
                break
            sub = parents[sub]
        return sup == ROOT_TYPE

    @property
    def static_predicates(self) -> frozenset[str]:
        """Predicates that no action adds or deletes."""
        changed = {a.predicate for act in self.actions for a in act.add + act.delete}
        return frozenset(p.name for p in self.predicates if p.name not in changed)


@dataclass(frozen=True)
class ProblemAst:
    name: str
    domain_name: str
    objects: tuple[TypedName, ...]
    init: tuple[Atom, ...]
    goal: tuple[Literal, ...]
    metric: bool = True
    # Optional guidance atoms from a (:hints ...) section; never part of the semantics.
    hints: tuple[Atom, ...] = field(default=())

    @property
    def goal_pos(self) -> tuple[Atom, ...]:
        return tuple(lit.atom for lit in self.goal if lit.positive)

    @property
    def goal_neg(self) -> tuple[Atom, ...]:
        return tuple(lit.atom for lit in self.goal if not lit.positive)
