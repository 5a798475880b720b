"""Chat prompt construction and reply parsing for LLM-backed anticipation."""

from __future__ import annotations

import json
from typing import Sequence

from .core import PromptContext

SYSTEM_PROMPT = (
    "You help a household assistant robot anticipate the tasks it will be asked to do. "
    "Only use task ids from the provided list. Answer with a JSON array of task ids."
)


def catalog_json(ctx: PromptContext) -> str:
    data = {a.name: list(a.tasks) for a in ctx.catalog.activities}
    return json.dumps(data)


def _routine(tasks: Sequence[str]) -> str:
    return json.dumps(list(tasks))


def _request(prefix: Sequence[str], horizon) -> str:
    how_many = "all remaining tasks" if horizon == "all" else f"the next {horizon} tasks"
    return (f"Partial routine for today: {_routine(prefix)}\n"
            f"Predict {how_many} of this routine, in order. "
            "Output only a JSON array of task ids.")


def build_prompt(ctx: PromptContext) -> list[dict[str, str]]:
    """Messages in order: catalog, two example days, worked examples (with context), request."""
    messages = [
        {"role": "system", "content": SYSTEM_PROMPT},
        {"role": "user", "content": "Household tasks grouped by activity (JSON):\n" + catalog_json(ctx)},
    ]
    days = "\n".join(f"Routine on day {i}: {_routine(r.tasks)}" for i, r in enumerate(ctx.example_routines, 1))
    messages.append({"role": "user", "content": "Routines followed on previous days:\n" + days})
    for prefix, completion in ctx.contextual_examples or ():
        messages.append({"role": "user", "content": _request(prefix, "all")})
        messages.append({"role": "assistant", "content": _routine(completion)})
    final = _request(ctx.prefix, ctx.horizon)
    if ctx.state_summary is not None:
        final += "\nCurrent state of the house (JSON): " + json.dumps(ctx.state_summary, sort_keys=True)
    if ctx.constraint_note:
        final += "\n" + ctx.constraint_note
    messages.append({"role": "user", "content": final})
    return messages


def extract_task_array(text: str) -> list[str] | None:
    """First well-formed JSON array of strings in ``text``, or None."""
    decoder = json.JSONDecoder()
    start = text.find("[")
    while start != -1:
        try:
            value, _ = decoder.raw_decode(text, start)
        except json.JSONDecodeError:
            value = None
        if isinstance(value, list) and all(isinstance(v, str) for v in value):
            return value
        start = text.find("[", start + 1)
    return None
