"""Exceptions raised by the PDDL front-end and its STRIPS semantics."""

from __future__ import annotations


class PddlError(Exception):
    """Base class for everything raised by :mod:`antplan.pddl`."""


class SourceError(PddlError):
    """An error tied to a position in PDDL source text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class LexError(SourceError):
    pass


class ParseError(SourceError):
    pass


class PddlTypeError(SourceError):
    """Undeclared type or predicate, arity mismatch, unbound variable, ill-typed argument."""


class UnsupportedFeature(SourceError):
    """A construct outside the STRIPS + types + negative preconditions + costs subset."""


class GoalUsesUnknownObject(PddlTypeError):
    pass


class GroundingError(PddlError):
    pass


class NotApplicable(PddlError):
    pass
