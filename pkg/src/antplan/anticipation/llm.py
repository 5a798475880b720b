"""Chat-completion HTTP client for LLM-backed anticipation."""

from __future__ import annotations

import os
from dataclasses import dataclass

import httpx

from .core import Anticipation, AnticipationError, PromptContext, filter_to_catalog
from .prompt import build_prompt, extract_task_array


class NetworkError(AnticipationError):
    pass


class AuthError(AnticipationError):
    pass


class MalformedReply(AnticipationError):
    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw
        self.anticipation = Anticipation((), raw)


@dataclass(frozen=True)
class LLMConfig:
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4"
    api_key_env: str = "OPENAI_API_KEY"
    temperature: float = 0.0
    timeout: float = 60.0

    def api_key(self) -> str:
        key = os.environ.get(self.api_key_env)
        if not key:
            raise AuthError(f"environment variable {self.api_key_env} is not set")
        return key


def request_payload(ctx: PromptContext, config: LLMConfig) -> dict:
    return {"model": config.model, "messages": build_prompt(ctx), "temperature": config.temperature}


def reply_text(body: dict) -> str:
    try:
        return body["choices"][0]["message"]["content"] or ""
    except (KeyError, IndexError, TypeError) as exc:
        raise MalformedReply("response has no choices[0].message.content", str(body)) from exc


def parse_reply(text: str, ctx: PromptContext) -> Anticipation:
    tasks = extract_task_array(text)
    if tasks is None:
        raise MalformedReply("no JSON array of task ids in the reply", text)
    return filter_to_catalog(Anticipation(tuple(tasks), text), ctx.catalog)


def llm_anticipate(ctx: PromptContext, config: LLMConfig, client: httpx.Client | None = None) -> Anticipation:
    """Send the prompt to ``{base_url}/chat/completions`` and parse the first task array.

    One blocking request per call. ``client`` is injectable so tests can use a
    mock transport.
    """
    headers = {"Authorization": f"Bearer {config.api_key()}"}
    url = config.base_url.rstrip("/") + "/chat/completions"
    own = client is None
    client = client or httpx.Client(timeout=config.timeout)
    try:
        resp = client.post(url, json=request_payload(ctx, config), headers=headers)
    except httpx.HTTPError as exc:
        raise NetworkError(f"request to {url} failed: {exc}") from exc
    finally:
        if own:
            client.close()
    if resp.status_code in (401, 403):
        raise AuthError(f"endpoint rejected the credentials (HTTP {resp.status_code})")
    if resp.status_code >= 400:
        raise NetworkError(f"HTTP {resp.status_code} from {url}: {resp.text[:200]}")
    try:
        body = resp.json()
    except ValueError as exc:
        raise MalformedReply("response body is not JSON", resp.text) from exc
    return parse_reply(reply_text(body), ctx)


class LLMAnticipator:
    def __init__(self, config: LLMConfig, client: httpx.Client | None = None):
        self.config = config
        self.client = client

    def anticipate(self, ctx: PromptContext) -> Anticipation:
        result = llm_anticipate(ctx, self.config, self.client)
        return Anticipation(tuple(ctx.limit(result.tasks)), result.raw)
