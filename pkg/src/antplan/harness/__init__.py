"""Experiment drivers: anticipation evaluation, paired planning trials, interrupts."""

from .anticipation_eval import (
    TrialRecord,
    run_anticipation_eval,
    run_anticipation_trials,
    run_constraint_eval,
    setup_trials,
)
from .episode import (
    BatchRecord,
    Episode,
    PairedTrial,
    PlanningFailed,
    run_episode,
    run_paired_trial,
    run_planning_experiment,
)
from .instances import Instance, random_instances, task_roster, task_rosters
from .interrupt import (
    InterruptEvent,
    InterruptTranscript,
    ReplanFailed,
    load_script,
    run_interrupt_demo,
    run_script,
    state_summary,
)
from .results import emit_anticipation_results, emit_results, planning_summary
from .world import World

__all__ = [
    "TrialRecord", "run_anticipation_eval", "run_anticipation_trials", "run_constraint_eval", "setup_trials",
    "BatchRecord", "Episode", "PairedTrial", "PlanningFailed", "run_episode", "run_paired_trial",
    "run_planning_experiment", "InterruptEvent", "InterruptTranscript", "ReplanFailed", "load_script",
    "run_interrupt_demo", "run_script", "state_summary", "emit_anticipation_results", "emit_results",
    "planning_summary", "World", "Instance", "random_instances", "task_roster", "task_rosters",
]
