"""Render ASTs back to PDDL text. Output re-parses to an equal AST."""

from __future__ import annotations

from .ast import ActionSchema, Atom, DomainAst, Literal, ProblemAst, TypedName


def _typed(names: tuple[TypedName, ...] | list[TypedName]) -> str:
    parts: list[str] = []
    i = 0
    names = list(names)
    while i < len(names):
        j = i
        while j < len(names) and names[j].type == names[i].type:
            j += 1
        group = " ".join(n.name for n in names[i:j])
        parts.append(f"{group} - {names[i].type}")
        i = j
    return " ".join(parts)


def _conj(lits: list[str], indent: str) -> str:
    if not lits:
        return "(and)"
    if len(lits) == 1:
        return f"(and {lits[0]})"
    sep = "\n" + indent + "     "
    return "(and " + sep.join(lits) + ")"


def format_action(act: ActionSchema, indent: str = "  ") -> str:
    pre = [str(a) for a in act.pre_pos] + [str(Literal(a, False)) for a in act.pre_neg]
    eff = [str(a) for a in act.add] + [str(Literal(a, False)) for a in act.delete]
    if act.explicit_cost:
        eff.append(f"(increase (total-cost) {act.cost})")
    inner = indent + "  "
    return (
        f"{indent}(:action {act.name}\n"
        f"{inner}:parameters ({_typed(act.parameters)})\n"
        f"{inner}:precondition {_conj(pre, inner + '             ')}\n"
        f"{inner}:effect {_conj(eff, inner + '        ')})"
    )


def format_domain(domain: DomainAst) -> str:
    lines = [f"(define (domain {domain.name})"]
    if domain.requirements:
        lines.append(f"  (:requirements {' '.join(domain.requirements)})")
    if domain.types:
        lines.append(f"  (:types {_typed(domain.types)})")
    if domain.constants:
        lines.append(f"  (:constants {_typed(domain.constants)})")
    lines.append("  (:predicates")
    for p in domain.predicates:
        params = f" {_typed(p.params)}" if p.params else ""
        lines.append(f"    ({p.name}{params})")
    lines[-1] += ")"
    if domain.has_total_cost:
        lines.append("  (:functions (total-cost) - number)")
    for act in domain.actions:
        lines.append(format_action(act))
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def _atoms_block(atoms: list[str], indent: str) -> str:
    return ("\n" + indent).join(atoms)


def format_problem(problem: ProblemAst, header: str = "") -> str:
    lines = []
    if header:
        lines.extend(f"; {h}" for h in header.splitlines())
    lines.append(f"(define (problem {problem.name})")
    lines.append(f"  (:domain {problem.domain_name})")
    if problem.objects:
        lines.append(f"  (:objects {_typed(problem.objects)})")
    init = [str(a) for a in problem.init]
    if problem.metric:
        init.append("(= (total-cost) 0)")
    lines.append("  (:init " + _atoms_block(init, "         ") + ")")
    goal = [str(lit) for lit in problem.goal]
    lines.append("  (:goal " + _conj(goal, "         ") + ")")
    if problem.hints:
        lines.append("  (:hints " + " ".join(str(h) for h in problem.hints) + ")")
    if problem.metric:
        lines.append("  (:metric minimize (total-cost))")
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def format_atom(atom: Atom) -> str:
    return str(atom)
