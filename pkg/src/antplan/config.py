"""Settings file: INI-style ``key = value`` lines grouped under sections.

Example::

    [paths]
    catalog = my_catalog.json
    domain = my_domain.pddl
    goalmap = my_goalmap.json

    [seeds]
    experiment = 7

    [planner]
    heuristic = h_ff
    time_unit = 2.0

    [llm]
    base_url = https://api.openai.com/v1
    model = gpt-4
    api_key_env = OPENAI_API_KEY
    temperature = 0
    timeout = 60

Every key is optional. Relative paths resolve against the file's directory.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .anticipation import LLMConfig

KNOWN = {
    "paths": {"catalog", "domain", "goalmap"},
    "seeds": {"experiment"},
    "planner": {"heuristic", "time_unit"},
    "llm": {"base_url", "model", "api_key_env", "temperature", "timeout"},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Settings:
    catalog: Path | None = None
    domain: Path | None = None
    goalmap: Path | None = None
    seed: int = 0
    heuristic: str = "h_ff"
    time_unit: float = 2.0
    llm: LLMConfig = field(default_factory=LLMConfig)


def load_settings(path: str | Path | None) -> Settings:
    if path is None:
        return Settings()
    path = Path(path)
    parser = configparser.ConfigParser()
    try:
        with path.open() as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for section in parser.sections():
        if section not in KNOWN:
            raise ConfigError(f"{path}: unknown section [{section}]")
        extra = set(parser[section]) - KNOWN[section]
        if extra:
            raise ConfigError(f"{path}: unknown keys in [{section}]: {', '.join(sorted(extra))}")

    def p(key: str) -> Path | None:
        value = parser.get("paths", key, fallback=None)
        return None if not value else (path.parent / value).resolve()

    try:
        llm_defaults = LLMConfig()
        llm = LLMConfig(
            base_url=parser.get("llm", "base_url", fallback=llm_defaults.base_url),
            model=parser.get("llm", "model", fallback=llm_defaults.model),
            api_key_env=parser.get("llm", "api_key_env", fallback=llm_defaults.api_key_env),
            temperature=parser.getfloat("llm", "temperature", fallback=llm_defaults.temperature),
            timeout=parser.getfloat("llm", "timeout", fallback=llm_defaults.timeout),
        )
        return Settings(
            catalog=p("catalog"),
            domain=p("domain"),
            goalmap=p("goalmap"),
            seed=parser.getint("seeds", "experiment", fallback=0),
            heuristic=parser.get("planner", "heuristic", fallback="h_ff"),
            time_unit=parser.getfloat("planner", "time_unit", fallback=2.0),
            llm=llm,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
