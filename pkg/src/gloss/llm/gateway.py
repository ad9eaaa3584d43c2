"""Task-level operations on top of a completion provider.

Every conversational feature goes through one of four tasks, each with its
own prompt template under ``prompts/`` (the system text) and a JSON payload
in the user text:

    generate   {"prompt": str}
    classify   {"utterance": str, "candidates": [{edge_id, label,
                description, examples}]}
    branch     {"scene": {id, avatar_utterance, description},
                "utterance": str, "existing_labels": [str]}
    feedback   {"scene": {...}, "utterance": str, "decision": {kind,
                intent_label, ...}}

The feedback payload deliberately carries only the scene, the student
utterance, and the final decision; candidate edges never reach the
feedback prompt.

Structured tasks get one repair retry: if the provider output cannot be
parsed and validated, the same task is reissued once with the malformed
output attached, then the task fails.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from typing import Any, Callable, Mapping, Sequence, TypeVar

from gloss.errors import (
    EmptyCandidatesError,
    MalformedClassificationError,
    MalformedGenerationError,
    SchemaViolationError,
)
from gloss.graph.model import SceneNode, TransitionEdge
from gloss.llm.config import OutputShape, PromptRequest, PromptTask
from gloss.llm.providers import Provider

T = TypeVar("T")


@dataclass(frozen=True)
class IntentMatch:
    """One candidate edge scored against a student utterance."""

    edge_id: str
    confidence: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be within [0, 1]")


@dataclass(frozen=True)
class BranchProposal:
    """A provider-invented continuation: new intent plus the scene it leads to."""

    intent_label: str
    intent_description: str
    avatar_reply: str
    scene_description: str
    terminal: bool


class _MalformedOutput(ValueError):
    pass


# Decode callbacks may also raise ValueError or a schema violation (for
# example while decoding a generated graph); all trigger the repair retry.
_DECODE_FAILURES = (ValueError, SchemaViolationError)


@lru_cache(maxsize=None)
def _prompt_text(name: str) -> str:
    return (resources.files("gloss.llm") / "prompts" / f"{name}.txt").read_text(encoding="utf-8")


def _payload_text(payload: Any) -> str:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True)


def _scene_payload(scene: SceneNode) -> dict[str, str]:
    return {
        "id": scene.id,
        "avatar_utterance": scene.avatar_utterance,
        "description": scene.description,
    }


def complete(provider: Provider, request: PromptRequest) -> str:
    """Run one raw completion. Exists as the single chokepoint every task
    goes through; transport retries live inside the provider."""
    return provider.complete(request)


def _parse_json_text(raw: str) -> Any:
    text = raw.strip()
    if text.startswith("```"):
        # Tolerate a markdown fence around otherwise valid JSON.
        lines = text.splitlines()
        if lines and lines[0].startswith("```"):
            lines = lines[1:]
        if lines and lines[-1].strip() == "```":
            lines = lines[:-1]
        text = "\n".join(lines).strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _MalformedOutput(f"output is not valid JSON: {exc}") from exc


def _structured(
    provider: Provider,
    request: PromptRequest,
    decode: Callable[[Any], T],
    failure: Callable[[str], Exception],
) -> T:
    raw = complete(provider, request)
    try:
        return decode(_parse_json_text(raw))
    except _DECODE_FAILURES as first:
        repair_payload = {
            "original": request.user_text,
            "malformed_output": raw,
            "problem": str(first),
            "instruction": "Your previous output was unusable. Return only the corrected JSON.",
        }
        repair = replace(request, user_text=_payload_text(repair_payload))
        raw_retry = complete(provider, repair)
        try:
            return decode(_parse_json_text(raw_retry))
        except _DECODE_FAILURES as second:
            raise failure(f"provider output unusable after one repair retry: {second}") from second


def build_generate_request(prompt: str) -> PromptRequest:
    return PromptRequest(
        task=PromptTask.GENERATE,
        system_text=_prompt_text("generate"),
        user_text=_payload_text({"prompt": prompt}),
        expects=OutputShape.STRUCTURED_JSON,
    )


def generate_payload(
    provider: Provider, prompt: str, decode: Callable[[Any], T] = lambda x: x
) -> T:
    """Run the generate task and return the decoded payload.

    ``decode`` turns the parsed JSON into the caller's type and may raise
    ValueError to signal an unusable payload, which triggers the repair
    retry.

    Raises:
        MalformedGenerationError: After the repair retry also fails.
        ProviderError: On transport failure.
    """
    return _structured(
        provider, build_generate_request(prompt), decode, MalformedGenerationError
    )


def classify_intent(
    provider: Provider, utterance: str, candidates: Sequence[TransitionEdge]
) -> tuple[IntentMatch, ...]:
    """Score the utterance against every candidate edge.

    Returns one IntentMatch per candidate, confidence clamped to [0, 1],
    sorted by confidence descending; ties keep the original candidate
    order.

    Raises:
        EmptyCandidatesError: If no candidates were given.
        MalformedClassificationError: If the provider output stayed
            unusable after the repair retry.
        ProviderError: On transport failure.
    """
    if not candidates:
        raise EmptyCandidatesError("classify_intent needs at least one candidate")
    payload = {
        "utterance": utterance,
        "candidates": [
            {
                "edge_id": edge.id,
                "label": edge.intent.label,
                "description": edge.intent.description,
                "examples": list(edge.intent.examples),
            }
            for edge in candidates
        ],
    }
    request = PromptRequest(
        task=PromptTask.CLASSIFY,
        system_text=_prompt_text("classify"),
        user_text=_payload_text(payload),
        expects=OutputShape.STRUCTURED_JSON,
    )

    expected_ids = [edge.id for edge in candidates]

    def decode(data: Any) -> dict[str, float]:
        if not isinstance(data, list):
            raise _MalformedOutput("expected a JSON array of scores")
        scores: dict[str, float] = {}
        for item in data:
            if not isinstance(item, dict):
                raise _MalformedOutput("each score must be an object")
            edge_id = item.get("edge_id")
            confidence = item.get("confidence")
            if not isinstance(edge_id, str) or edge_id not in expected_ids:
                raise _MalformedOutput(f"unknown edge_id {edge_id!r}")
            if edge_id in scores:
                raise _MalformedOutput(f"duplicate edge_id {edge_id!r}")
            if isinstance(confidence, bool) or not isinstance(confidence, (int, float)):
                raise _MalformedOutput(f"confidence for {edge_id!r} is not a number")
            value = float(confidence)
            if not math.isfinite(value):
                raise _MalformedOutput(f"confidence for {edge_id!r} is not finite")
            scores[edge_id] = min(1.0, max(0.0, value))
        missing = [x for x in expected_ids if x not in scores]
        if missing:
            raise _MalformedOutput(f"missing scores for {missing}")
        return scores

    by_id = _structured(provider, request, decode, MalformedClassificationError)
    in_candidate_order = [IntentMatch(edge_id=x, confidence=by_id[x]) for x in expected_ids]
    return tuple(sorted(in_candidate_order, key=lambda m: -m.confidence))


def propose_branch(
    provider: Provider,
    scene: SceneNode,
    utterance: str,
    existing_labels: Sequence[str],
) -> BranchProposal:
    """Ask the provider to invent a branch for an unmatched utterance.

    The returned label never collides with ``existing_labels``
    (case-insensitive): a colliding proposal is relabelled "gen-" + label,
    then "gen-2-" + label and so on until free.

    Raises:
        MalformedGenerationError: If the proposal stayed unusable after the
            repair retry.
        ProviderError: On transport failure.
    """
    payload = {
        "scene": _scene_payload(scene),
        "utterance": utterance,
        "existing_labels": list(existing_labels),
    }
    request = PromptRequest(
        task=PromptTask.BRANCH,
        system_text=_prompt_text("branch"),
        user_text=_payload_text(payload),
        expects=OutputShape.STRUCTURED_JSON,
    )

    def decode(data: Any) -> BranchProposal:
        if not isinstance(data, dict):
            raise _MalformedOutput("expected a JSON object")
        label = data.get("intent_label")
        reply = data.get("avatar_reply")
        if not isinstance(label, str) or not label.strip():
            raise _MalformedOutput("intent_label must be a non-empty string")
        if "\n" in label or "\r" in label:
            raise _MalformedOutput("intent_label must not contain newlines")
        if not isinstance(reply, str) or not reply:
            raise _MalformedOutput("avatar_reply must be a non-empty string")
        description = data.get("intent_description", "")
        scene_description = data.get("scene_description", "")
        terminal = data.get("terminal", False)
        if not isinstance(description, str) or not isinstance(scene_description, str):
            raise _MalformedOutput("descriptions must be strings")
        if not isinstance(terminal, bool):
            raise _MalformedOutput("terminal must be a boolean")
        return BranchProposal(
            intent_label=label.strip(),
            intent_description=description,
            avatar_reply=reply,
            scene_description=scene_description,
            terminal=terminal,
        )

    proposal = _structured(provider, request, decode, MalformedGenerationError)
    taken = {x.casefold() for x in existing_labels}
    label = proposal.intent_label
    if label.casefold() in taken:
        label = f"gen-{proposal.intent_label}"
        bump = 2
        while label.casefold() in taken:
            label = f"gen-{bump}-{proposal.intent_label}"
            bump += 1
        proposal = replace(proposal, intent_label=label)
    return proposal


def compose_feedback(
    provider: Provider,
    scene: SceneNode,
    utterance: str,
    decision: Mapping[str, Any],
) -> str:
    """Coach the student on one turn.

    ``decision`` is the final-decision payload (built by the session
    engine): ``kind`` ("matched" | "generated_branch" | "rejected"),
    ``intent_label`` (null when rejected), and the variant's own numbers.
    Nothing else about the graph is sent; this prompt is independent of
    matching.

    Raises:
        MalformedGenerationError: If the provider returns empty feedback.
        ProviderError: On transport failure.
    """
    payload = {
        "scene": _scene_payload(scene),
        "utterance": utterance,
        "decision": dict(decision),
    }
    request = PromptRequest(
        task=PromptTask.FEEDBACK,
        system_text=_prompt_text("feedback"),
        user_text=_payload_text(payload),
        expects=OutputShape.FREE_TEXT,
    )
    text = complete(provider, request).strip()
    if not text:
        raise MalformedGenerationError("provider returned empty feedback")
    return text
