"""Forward-search planning over ground tasks."""

from .compiled import Compiled, compile_task
from .heuristics import Heuristic, h_add, h_ff, h_max
from .search import BudgetExceeded, PlanResult, SearchConfig, optimal_oracle, plan

__all__ = [
    "Compiled", "compile_task", "Heuristic", "h_add", "h_ff", "h_max",
    "BudgetExceeded", "PlanResult", "SearchConfig", "optimal_oracle", "plan",
]
