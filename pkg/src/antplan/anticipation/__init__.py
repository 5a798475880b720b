"""Predict upcoming tasks from a partial routine."""

from .core import (
    Anticipation,
    AnticipationError,
    Anticipator,
    ConstrainedOracleAnticipator,
    OracleAnticipator,
    PrefixMismatch,
    PromptContext,
    ScriptedAnticipator,
    UnknownTask,
    filter_to_catalog,
    oracle_anticipate,
)
from .llm import AuthError, LLMAnticipator, LLMConfig, MalformedReply, NetworkError, llm_anticipate
from .markov import MarkovAnticipator, TransitionMatrix, fit_markov, markov_anticipate
from .prompt import build_prompt, extract_task_array

__all__ = [
    "Anticipation", "AnticipationError", "Anticipator", "ConstrainedOracleAnticipator", "OracleAnticipator",
    "PrefixMismatch", "PromptContext", "ScriptedAnticipator", "UnknownTask", "filter_to_catalog",
    "oracle_anticipate", "AuthError", "LLMAnticipator", "LLMConfig", "MalformedReply", "NetworkError",
    "llm_anticipate", "MarkovAnticipator", "TransitionMatrix", "fit_markov", "markov_anticipate",
    "build_prompt", "extract_task_array",
]
