"""Provider configuration and prompt request types."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping


class ProviderKind(str, Enum):
    MOCK = "mock"
    REMOTE_CHAT_COMPLETION = "remote"


class PromptTask(str, Enum):
    GENERATE = "generate"
    CLASSIFY = "classify"
    BRANCH = "branch"
    FEEDBACK = "feedback"


class OutputShape(str, Enum):
    FREE_TEXT = "free_text"
    STRUCTURED_JSON = "structured_json"


# Tasks whose output must parse as JSON; feedback stays free text.
_STRUCTURED_TASKS = frozenset({PromptTask.GENERATE, PromptTask.CLASSIFY, PromptTask.BRANCH})


@dataclass(frozen=True)
class ProviderConfig:
    """How to reach a completion provider.

    Remote configs need ``base_url`` and ``model``; the mock ignores them.
    ``timeout_s`` bounds one HTTP attempt and ``max_retries`` counts extra
    attempts after the first on timeouts and 5xx responses.
    """

    kind: ProviderKind = ProviderKind.MOCK
    base_url: str = ""
    api_key: str = ""
    model: str = ""
    timeout_s: float = 30.0
    max_retries: int = 1

    def __post_init__(self) -> None:
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.kind is ProviderKind.REMOTE_CHAT_COMPLETION:
            if not self.base_url:
                raise ValueError("remote provider requires base_url")
            if not self.model:
                raise ValueError("remote provider requires model")

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> "ProviderConfig":
        """Build a config from GLOSS_PROVIDER / GLOSS_BASE_URL / GLOSS_API_KEY /
        GLOSS_MODEL. Unset or "mock" selects the mock provider."""
        env = os.environ if env is None else env
        kind_text = env.get("GLOSS_PROVIDER", "mock").strip().lower() or "mock"
        try:
            kind = ProviderKind(kind_text)
        except ValueError:
            raise ValueError(
                f"GLOSS_PROVIDER must be 'mock' or 'remote', got {kind_text!r}"
            ) from None
        return cls(
            kind=kind,
            base_url=env.get("GLOSS_BASE_URL", ""),
            api_key=env.get("GLOSS_API_KEY", ""),
            model=env.get("GLOSS_MODEL", ""),
        )


@dataclass(frozen=True)
class PromptRequest:
    """One provider call: a task, its prompt texts, and the expected shape."""

    task: PromptTask
    system_text: str
    user_text: str
    expects: OutputShape = field(default=OutputShape.FREE_TEXT)

    def __post_init__(self) -> None:
        required = (
            OutputShape.STRUCTURED_JSON if self.task in _STRUCTURED_TASKS else OutputShape.FREE_TEXT
        )
        if self.expects is not required:
            raise ValueError(f"task {self.task.value} must expect {required.value}")
