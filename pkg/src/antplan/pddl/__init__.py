"""PDDL front-end: parsing, printing, grounding and STRIPS semantics."""

from .ast import ActionSchema, Atom, DomainAst, Literal, PredicateDef, ProblemAst, TypedName
from .errors import (
    GoalUsesUnknownObject,
    GroundingError,
    LexError,
    NotApplicable,
    ParseError,
    PddlError,
    PddlTypeError,
    UnsupportedFeature,
)
from .grounding import GroundAction, GroundTask, ground
from .parser import parse_domain, parse_problem
from .printer import format_domain, format_problem
from .semantics import Plan, State, ValidationReport, applicable, apply, format_plan, parse_plan, validate

__all__ = [
    "ActionSchema", "Atom", "DomainAst", "Literal", "PredicateDef", "ProblemAst", "TypedName",
    "GoalUsesUnknownObject", "GroundingError", "LexError", "NotApplicable", "ParseError", "PddlError",
    "PddlTypeError", "UnsupportedFeature",
    "GroundAction", "GroundTask", "ground",
    "parse_domain", "parse_problem", "format_domain", "format_problem",
    "Plan", "State", "ValidationReport", "applicable", "apply", "format_plan", "parse_plan", "validate",
]
