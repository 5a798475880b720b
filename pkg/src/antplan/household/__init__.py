"""Bundled household domain, task goals and scenario generation."""

from .goals import (
    GoalConflict,
    GoalError,
    TaskGoalMap,
    UnknownGoalKey,
    compose_goal,
    load_goal_map,
    parse_literal,
)
from .scenario import (
    Layout,
    Scenario,
    ScenarioSpec,
    build_scenario,
    canonical_scenario,
    domain_text,
    load_domain,
    load_layout,
    problem_ast,
    synthesize_problem,
)

__all__ = [
    "GoalConflict", "GoalError", "TaskGoalMap", "UnknownGoalKey", "compose_goal", "load_goal_map",
    "parse_literal", "Layout", "Scenario", "ScenarioSpec", "build_scenario", "canonical_scenario",
    "domain_text", "load_domain", "load_layout", "problem_ast", "synthesize_problem",
]
