"""Conversation sessions over a narrative graph.

A session is an immutable snapshot, like the graph it runs on:
``submit_turn`` returns the successor session, the (possibly grown) graph,
and the turn record. Nothing is persisted here; if any provider call
fails, the caller still holds the previous snapshots, so a turn either
happens completely or not at all.

Turn pipeline: collect the current node's outgoing edges, score them
against the student utterance, then resolve. A score at or above the
session threshold takes the best edge. Below it, strict graphs reject the
turn with a hint listing the expected intents, while flexible graphs grow
a new branch (provider-proposed) and advance into it, permanently
extending the shared graph. Every turn ends with coaching feedback
composed from the scene, the utterance, and the decision alone.
"""
from __future__ import annotations

import math
import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Callable, Sequence, Union

from gloss.errors import (
    EmptyGraphError,
    EmptyUtteranceError,
    InvalidGraphError,
    InvalidThresholdError,
    SessionCompletedError,
)
from gloss.graph.model import (
    DialogueMode,
    NarrativeGraph,
    Provenance,
    ResponseIntent,
    SceneNode,
    TransitionEdge,
    outgoing_edges,
)
from gloss.graph.mutations import (
    AddBranch,
    apply_mutation,
    next_generated_edge_id,
    next_generated_node_id,
)
from gloss.graph.validation import error_diagnostics
from gloss.llm.gateway import IntentMatch, classify_intent, compose_feedback, propose_branch
from gloss.llm.providers import Provider

DEFAULT_MATCH_THRESHOLD = 0.5

Clock = Callable[[], str]


def utc_now() -> str:
    """Current UTC time as an ISO-8601 string with millisecond precision."""
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds").replace("+00:00", "Z")


class SessionStatus(str, Enum):
    ACTIVE = "active"
    COMPLETED = "completed"


@dataclass(frozen=True)
class Matched:
    """The utterance matched an authored or generated intent."""

    edge_id: str
    confidence: float


@dataclass(frozen=True)
class GeneratedBranch:
    """No intent matched; a new branch was grown and taken."""

    new_edge_id: str
    new_node_id: str


@dataclass(frozen=True)
class Rejected:
    """No intent matched and the graph is strict; the scene did not move."""

    best_confidence: float
    hint: str


MatchDecision = Union[Matched, GeneratedBranch, Rejected]


@dataclass(frozen=True)
class NoMatch:
    """resolve_match outcome when no candidate clears the threshold."""

    best_confidence: float


@dataclass(frozen=True)
class Turn:
    index: int
    student_utterance: str
    decision: MatchDecision
    avatar_reply: str
    feedback: str
    from_node: str
    to_node: str
    at: str


@dataclass(frozen=True)
class Session:
    id: str
    graph_id: str
    graph_version_at_start: int
    current_node: str
    transcript: tuple[Turn, ...]
    status: SessionStatus
    match_threshold: float
    created_at: str


@dataclass(frozen=True)
class TurnOutcome:
    """Everything one accepted turn produced."""

    session: Session
    graph: NarrativeGraph
    turn: Turn


def start_session(
    graph: NarrativeGraph,
    threshold: float = DEFAULT_MATCH_THRESHOLD,
    *,
    session_id: str | None = None,
    clock: Clock = utc_now,
) -> Session:
    """Open a session at the graph's start node.

    Args:
        graph: A non-empty graph with zero error-severity diagnostics.
        threshold: Minimum classification confidence for a match, in [0, 1].
        session_id: Explicit id; a fresh unique one when omitted.
        clock: Timestamp source, injectable for deterministic replays.

    Raises:
        EmptyGraphError: If the graph has no nodes.
        InvalidGraphError: If validation reports any error.
        InvalidThresholdError: If the threshold is outside [0, 1].
    """
    if not graph.nodes:
        raise EmptyGraphError("cannot start a session on an empty graph")
    errors = error_diagnostics(graph)
    if errors:
        raise InvalidGraphError(errors)
    if math.isnan(threshold) or not 0.0 <= threshold <= 1.0:
        raise InvalidThresholdError(f"threshold must be within [0, 1], got {threshold}")
    assert graph.start_node is not None
    return Session(
        id=session_id or ("s-" + uuid.uuid4().hex[:12]),
        graph_id=graph.id,
        graph_version_at_start=graph.version,
        current_node=graph.start_node,
        transcript=(),
        status=SessionStatus.ACTIVE,
        match_threshold=threshold,
        created_at=clock(),
    )


def resolve_match(
    matches: Sequence[IntentMatch], threshold: float
) -> Matched | NoMatch:
    """Decide on ranked matches: the first one wins if it clears the
    threshold, otherwise NoMatch carrying the best confidence (0 when
    there were no candidates). Pure; unit-testable without a provider."""
    if matches and matches[0].confidence >= threshold:
        return Matched(edge_id=matches[0].edge_id, confidence=matches[0].confidence)
    return NoMatch(best_confidence=matches[0].confidence if matches else 0.0)


def _decision_payload(decision: MatchDecision, intent_label: str | None) -> dict[str, Any]:
    if isinstance(decision, Matched):
        return {"kind": "matched", "intent_label": intent_label, "confidence": decision.confidence}
    if isinstance(decision, GeneratedBranch):
        return {"kind": "generated_branch", "intent_label": intent_label}
    return {
        "kind": "rejected",
        "intent_label": None,
        "best_confidence": decision.best_confidence,
        "hint": decision.hint,
    }


def submit_turn(
    session: Session,
    graph: NarrativeGraph,
    provider: Provider,
    utterance: str,
    *,
    clock: Clock = utc_now,
) -> TurnOutcome:
    """Process one student utterance.

    Args:
        session: Active session snapshot.
        graph: Current snapshot of the session's graph.
        provider: Completion backend for matching, branching, and feedback.
        utterance: Student reply; must be non-empty after trimming.

    Raises:
        SessionCompletedError: If the session already ended.
        EmptyUtteranceError: If the utterance trims to nothing.
        ProviderError: If any provider call fails; session and graph are
            untouched in that case.
    """
    if session.status is not SessionStatus.ACTIVE:
        raise SessionCompletedError(f"session {session.id} is already completed")
    text = utterance.strip()
    if not text:
        raise EmptyUtteranceError("utterance must be non-empty")

    scene = graph.nodes[session.current_node]
    candidates = outgoing_edges(graph, session.current_node)
    matches: tuple[IntentMatch, ...] = ()
    if candidates:
        matches = classify_intent(provider, text, candidates)
    resolution = resolve_match(matches, session.match_threshold)

    new_graph = graph
    decision: MatchDecision
    intent_label: str | None
    if isinstance(resolution, Matched):
        edge = next(e for e in candidates if e.id == resolution.edge_id)
        decision = resolution
        intent_label = edge.intent.label
        to_node = edge.to_node
        avatar_reply = graph.nodes[to_node].avatar_utterance
    elif graph.mode is DialogueMode.FLEXIBLE:
        proposal = propose_branch(
            provider, scene, text, [e.intent.label for e in candidates]
        )
        new_node = SceneNode(
            id=next_generated_node_id(graph),
            avatar_utterance=proposal.avatar_reply,
            description=proposal.scene_description,
            terminal=proposal.terminal,
            provenance=Provenance.GENERATED,
        )
        new_edge = TransitionEdge(
            id=next_generated_edge_id(graph),
            from_node=session.current_node,
            to_node=new_node.id,
            intent=ResponseIntent(
                label=proposal.intent_label,
                description=proposal.intent_description,
                # The triggering utterance becomes the first example, so the
                # next student who says the same thing follows this branch.
                examples=(text,),
            ),
            provenance=Provenance.GENERATED,
        )
        new_graph = apply_mutation(graph, AddBranch(node=new_node, edge=new_edge))
        decision = GeneratedBranch(new_edge_id=new_edge.id, new_node_id=new_node.id)
        intent_label = proposal.intent_label
        to_node = new_node.id
        avatar_reply = proposal.avatar_reply
    else:
        hint = (
            ", ".join(e.intent.label for e in candidates) if candidates else "no options"
        )
        decision = Rejected(best_confidence=resolution.best_confidence, hint=hint)
        intent_label = None
        to_node = session.current_node
        avatar_reply = ""

    feedback = compose_feedback(
        provider, scene, text, _decision_payload(decision, intent_label)
    )

    turn = Turn(
        index=len(session.transcript),
        student_utterance=text,
        decision=decision,
        avatar_reply=avatar_reply,
        feedback=feedback,
        from_node=session.current_node,
        to_node=to_node,
        at=clock(),
    )
    status = (
        SessionStatus.COMPLETED if new_graph.nodes[to_node].terminal else SessionStatus.ACTIVE
    )
    new_session = replace(
        session,
        current_node=to_node,
        transcript=session.transcript + (turn,),
        status=status,
    )
    return TurnOutcome(session=new_session, graph=new_graph, turn=turn)


def end_session(session: Session) -> Session:
    """Explicitly finish an active session.

    Raises:
        SessionCompletedError: If it already completed.
    """
    if session.status is not SessionStatus.ACTIVE:
        raise SessionCompletedError(f"session {session.id} is already completed")
    return replace(session, status=SessionStatus.COMPLETED)
