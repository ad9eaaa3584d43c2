"""Completion providers.

``MockProvider`` answers every task deterministically and offline, so the
whole stack (tests, CLI, service) runs without network access. Apart from
the branch counter it is a pure function of the request: identical
classify, generate, and feedback requests always return identical bytes.

``RemoteChatProvider`` speaks the OpenAI-compatible chat-completions
contract: ``POST {base_url}/chat/completions`` with a bearer token and a
JSON body ``{"model": ..., "messages": [{"role": "system", ...},
{"role": "user", ...}]}``; the reply text is read from
``choices[0].message.content``.
"""
from __future__ import annotations

import abc
import json
import random
import string
import threading
import time
from typing import Any, Callable

import httpx

from gloss.errors import (
    ProviderHttpError,
    ProviderTimeoutError,
    ProviderUnavailableError,
)
from gloss.llm.config import PromptRequest, PromptTask, ProviderConfig, ProviderKind


class Provider(abc.ABC):
    """A completion backend the gateway can call."""

    @abc.abstractmethod
    def complete(self, request: PromptRequest) -> str:
        """Return the raw completion text for one request.

        Raises:
            ProviderError: On transport failure (timeout, HTTP error,
                unreachable host, unusable response envelope).
        """

    @abc.abstractmethod
    def name(self) -> str:
        """Short identifier for logs and CLI output."""


_PUNCTUATION_TABLE = str.maketrans("", "", string.punctuation)


def word_set(text: str) -> frozenset[str]:
    """Normalized word set: lowercase, ASCII punctuation stripped, split on
    whitespace."""
    return frozenset(text.lower().translate(_PUNCTUATION_TABLE).split())


def jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    """Set overlap in [0, 1]. Two empty sets count as identical (1.0)."""
    union = a | b
    if not union:
        return 1.0
    return len(a & b) / len(union)


class MockProvider(Provider):
    """Deterministic offline provider.

    Per-task contracts (each reads the JSON payload the gateway puts in
    ``user_text``):

    - generate: emits a fixed three-scene skeleton graph parameterized by
      the prompt (title = prompt, opening line mentions the prompt).
    - classify: per candidate, confidence = max Jaccard similarity between
      the utterance's word set and each example's word set; with no
      examples, the word set of label + description is used instead.
    - branch: emits ``intent_label`` "gen-" + zero-padded call counter
      (first call "gen-001"), ``avatar_reply`` "Mock reply to: " + the
      utterance, ``scene_description`` "Auto branch", ``terminal`` false.
      The counter is the only state this provider keeps; a fresh instance
      replays a session byte-identically.
    - feedback: emits exactly "Mock feedback for intent L" where L is the
      decision's intent label, or "<none>" when the turn was rejected.
    """

    def __init__(self) -> None:
        self._branch_calls = 0
        self._lock = threading.Lock()

    def name(self) -> str:
        return "mock"

    def complete(self, request: PromptRequest) -> str:
        payload = json.loads(request.user_text)
        if request.task is PromptTask.GENERATE:
            return self._generate(payload["prompt"])
        if request.task is PromptTask.CLASSIFY:
            return self._classify(payload["utterance"], payload["candidates"])
        if request.task is PromptTask.BRANCH:
            return self._branch(payload["utterance"])
        return self._feedback(payload["decision"])

    def _generate(self, prompt: str) -> str:
        skeleton = {
            "title": prompt,
            "mode": "flexible",
            "start_node": "n0",
            "nodes": [
                {
                    "id": "n0",
                    "avatar_utterance": f"Mock scenario opening for: {prompt}",
                    "description": "Opening scene",
                    "terminal": False,
                },
                {
                    "id": "n1",
                    "avatar_utterance": "Mock positive outcome.",
                    "description": "Constructive path",
                    "terminal": True,
                },
                {
                    "id": "n2",
                    "avatar_utterance": "Mock negative outcome.",
                    "description": "Unhelpful path",
                    "terminal": True,
                },
            ],
            "edges": [
                {
                    "id": "e1",
                    "from": "n0",
                    "to": "n1",
                    "intent": {
                        "label": "constructive",
                        "description": "Respond constructively",
                        "examples": ["I will help you with that right away"],
                    },
                },
                {
                    "id": "e2",
                    "from": "n0",
                    "to": "n2",
                    "intent": {
                        "label": "dismissive",
                        "description": "Dismiss the concern",
                        "examples": ["that is not my problem"],
                    },
                },
            ],
        }
        return json.dumps(skeleton, ensure_ascii=False, sort_keys=True)

    def _classify(self, utterance: str, candidates: list[dict[str, Any]]) -> str:
        utterance_words = word_set(utterance)
        scores = []
        for candidate in candidates:
            examples = candidate.get("examples", [])
            if examples:
                confidence = max(jaccard(utterance_words, word_set(x)) for x in examples)
            else:
                fallback = f"{candidate.get('label', '')} {candidate.get('description', '')}"
                confidence = jaccard(utterance_words, word_set(fallback))
            scores.append({"edge_id": candidate["edge_id"], "confidence": confidence})
        return json.dumps(scores, ensure_ascii=False, sort_keys=True)

    def _branch(self, utterance: str) -> str:
        with self._lock:
            self._branch_calls += 1
            counter = self._branch_calls
        proposal = {
            "intent_label": f"gen-{counter:03d}",
            "intent_description": "Auto-generated intent",
            "avatar_reply": f"Mock reply to: {utterance}",
            "scene_description": "Auto branch",
            "terminal": False,
        }
        return json.dumps(proposal, ensure_ascii=False, sort_keys=True)

    def _feedback(self, decision: dict[str, Any]) -> str:
        label = decision.get("intent_label") or "<none>"
        return f"Mock feedback for intent {label}"


class RemoteChatProvider(Provider):
    """HTTP chat-completions provider with bounded retries.

    Timeouts and 5xx responses are retried up to ``max_retries`` extra
    attempts with jittered exponential backoff; other HTTP errors fail
    immediately. Connection failures after all retries raise
    ProviderUnavailableError.
    """

    # Base delay for the first retry; grows 2x per attempt plus jitter.
    _BACKOFF_BASE_S = 0.2

    def __init__(
        self,
        config: ProviderConfig,
        *,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ) -> None:
        if config.kind is not ProviderKind.REMOTE_CHAT_COMPLETION:
            raise ValueError("RemoteChatProvider requires a remote config")
        self._config = config
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._client = httpx.Client(timeout=config.timeout_s, transport=transport)

    def name(self) -> str:
        return f"remote:{self._config.model}"

    def close(self) -> None:
        self._client.close()

    def complete(self, request: PromptRequest) -> str:
        url = self._config.base_url.rstrip("/") + "/chat/completions"
        body = {
            "model": self._config.model,
            "messages": [
                {"role": "system", "content": request.system_text},
                {"role": "user", "content": request.user_text},
            ],
        }
        headers = {}
        if self._config.api_key:
            headers["Authorization"] = f"Bearer {self._config.api_key}"

        attempts = self._config.max_retries + 1
        last_error: Exception = ProviderUnavailableError("provider not attempted")
        for attempt in range(attempts):
            if attempt:
                delay = self._BACKOFF_BASE_S * (2 ** (attempt - 1))
                self._sleep(delay + self._rng.uniform(0, self._BACKOFF_BASE_S))
            try:
                response = self._client.post(url, json=body, headers=headers)
            except httpx.TimeoutException as exc:
                last_error = ProviderTimeoutError(
                    f"provider timed out after {self._config.timeout_s}s"
                )
                last_error.__cause__ = exc
                continue
            except httpx.HTTPError as exc:
                last_error = ProviderUnavailableError(f"provider unreachable: {exc}")
                last_error.__cause__ = exc
                continue
            if response.status_code >= 500:
                last_error = ProviderHttpError(response.status_code)
                continue
            if response.status_code != 200:
                raise ProviderHttpError(response.status_code)
            return self._extract_content(response)
        raise last_error

    @staticmethod
    def _extract_content(response: httpx.Response) -> str:
        try:
            payload = response.json()
            content = payload["choices"][0]["message"]["content"]
        except (ValueError, LookupError, TypeError) as exc:
            raise ProviderUnavailableError(
                "provider response did not contain choices[0].message.content"
            ) from exc
        if not isinstance(content, str):
            raise ProviderUnavailableError("provider message content was not text")
        return content


def provider_from_config(
    config: ProviderConfig, *, transport: httpx.BaseTransport | None = None
) -> Provider:
    """Instantiate the provider a config describes."""
    if config.kind is ProviderKind.MOCK:
        return MockProvider()
    return RemoteChatProvider(config, transport=transport)
