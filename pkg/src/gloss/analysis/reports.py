"""Post-session analysis: paths, per-session reports, cohort aggregates.

All functions are read-only over session and graph snapshots. Rejected
turns never contribute path elements; they only show up in counts and the
per-turn feedback list.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from gloss.authoring.dot import render_dot
from gloss.errors import InconsistentTranscriptError
from gloss.graph.model import NarrativeGraph, TransitionEdge
from gloss.session.engine import (
    GeneratedBranch,
    Matched,
    Rejected,
    Session,
    SessionStatus,
    Turn,
)


def _edge_index(graph: NarrativeGraph) -> dict[str, TransitionEdge]:
    return {edge.id: edge for edge in graph.edges}


def _taken_edge_id(turn: Turn) -> str | None:
    if isinstance(turn.decision, Matched):
        return turn.decision.edge_id
    if isinstance(turn.decision, GeneratedBranch):
        return turn.decision.new_edge_id
    return None


def path_of(session: Session, graph: NarrativeGraph) -> tuple[str, ...]:
    """The session's walk through the graph as alternating node and edge
    ids, starting at the start node.

    A session with no effective movement yields just the start node.

    Raises:
        InconsistentTranscriptError: If the transcript does not replay over
            the graph (wrong graph, missing elements, broken chaining).
    """
    if session.graph_id != graph.id:
        raise InconsistentTranscriptError(
            f"session {session.id} belongs to graph {session.graph_id!r}, not {graph.id!r}"
        )
    if graph.start_node is None or graph.start_node not in graph.nodes:
        raise InconsistentTranscriptError("graph has no usable start node")

    edges = _edge_index(graph)
    position = graph.start_node
    path: list[str] = [position]
    for turn in session.transcript:
        if turn.from_node != position:
            raise InconsistentTranscriptError(
                f"turn {turn.index} starts at {turn.from_node!r} but the path is at {position!r}"
            )
        edge_id = _taken_edge_id(turn)
        if edge_id is None:
            if turn.to_node != position:
                raise InconsistentTranscriptError(
                    f"rejected turn {turn.index} moved from {position!r} to {turn.to_node!r}"
                )
            continue
        edge = edges.get(edge_id)
        if edge is None:
            raise InconsistentTranscriptError(
                f"turn {turn.index} took edge {edge_id!r} which is not in the graph"
            )
        if edge.from_node != position or edge.to_node != turn.to_node:
            raise InconsistentTranscriptError(
                f"turn {turn.index} disagrees with edge {edge_id!r} endpoints"
            )
        if edge.to_node not in graph.nodes:
            raise InconsistentTranscriptError(
                f"edge {edge_id!r} leads to missing node {edge.to_node!r}"
            )
        path.append(edge_id)
        path.append(edge.to_node)
        position = edge.to_node
    return tuple(path)


@dataclass(frozen=True)
class PerTurn:
    index: int
    kind: str
    feedback: str


@dataclass(frozen=True)
class SessionReport:
    session_id: str
    turns_total: int
    matched_count: int
    generated_count: int
    rejected_count: int
    completed: bool
    mean_confidence_of_matched: float
    per_turn: tuple[PerTurn, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "turns_total": self.turns_total,
            "matched_count": self.matched_count,
            "generated_count": self.generated_count,
            "rejected_count": self.rejected_count,
            "completed": self.completed,
            "mean_confidence_of_matched": self.mean_confidence_of_matched,
            "per_turn": [
                {"index": t.index, "kind": t.kind, "feedback": t.feedback} for t in self.per_turn
            ],
        }


def _decision_kind(turn: Turn) -> str:
    if isinstance(turn.decision, Matched):
        return "matched"
    if isinstance(turn.decision, GeneratedBranch):
        return "generated_branch"
    return "rejected"


def session_report(session: Session) -> SessionReport:
    """Summarise one session: decision counts, completion, mean matched
    confidence (0.0 when nothing matched), and per-turn feedback."""
    confidences = [
        t.decision.confidence for t in session.transcript if isinstance(t.decision, Matched)
    ]
    matched = len(confidences)
    generated = sum(1 for t in session.transcript if isinstance(t.decision, GeneratedBranch))
    rejected = sum(1 for t in session.transcript if isinstance(t.decision, Rejected))
    return SessionReport(
        session_id=session.id,
        turns_total=len(session.transcript),
        matched_count=matched,
        generated_count=generated,
        rejected_count=rejected,
        completed=session.status is SessionStatus.COMPLETED,
        mean_confidence_of_matched=sum(confidences) / matched if matched else 0.0,
        per_turn=tuple(
            PerTurn(index=t.index, kind=_decision_kind(t), feedback=t.feedback)
            for t in session.transcript
        ),
    )


@dataclass(frozen=True)
class CohortSummary:
    """Traversal counts across many sessions of one graph. Every edge and
    node of the graph appears, including never-visited ones with count 0."""

    graph_id: str
    sessions_total: int
    edge_counts: dict[str, int]
    node_visits: dict[str, int]

    def to_dict(self) -> dict[str, Any]:
        return {
            "graph_id": self.graph_id,
            "sessions_total": self.sessions_total,
            "edges": dict(sorted(self.edge_counts.items())),
            "nodes": dict(sorted(self.node_visits.items())),
        }


def cohort_summary(graph: NarrativeGraph, sessions: Sequence[Session]) -> CohortSummary:
    """Aggregate traversal counts over sessions of one graph.

    Each session contributes one visit to the start node plus one edge
    traversal and one node visit per non-rejected turn, so the edge counts
    sum to the total of matched and generated turns.

    Raises:
        InconsistentTranscriptError: If a session belongs to another graph
            or references elements the graph does not have.
    """
    edge_counts = {edge.id: 0 for edge in graph.edges}
    node_visits = {node_id: 0 for node_id in graph.nodes}
    for session in sessions:
        if session.graph_id != graph.id:
            raise InconsistentTranscriptError(
                f"session {session.id} belongs to graph {session.graph_id!r}, not {graph.id!r}"
            )
        if graph.start_node not in node_visits:
            raise InconsistentTranscriptError("graph has no usable start node")
        node_visits[graph.start_node] += 1
        for turn in session.transcript:
            edge_id = _taken_edge_id(turn)
            if edge_id is None:
                continue
            if edge_id not in edge_counts or turn.to_node not in node_visits:
                raise InconsistentTranscriptError(
                    f"session {session.id} turn {turn.index} references elements "
                    f"missing from graph {graph.id!r}"
                )
            edge_counts[edge_id] += 1
            node_visits[turn.to_node] += 1
    return CohortSummary(
        graph_id=graph.id,
        sessions_total=len(sessions),
        edge_counts=edge_counts,
        node_visits=node_visits,
    )


def overlay_dot(graph: NarrativeGraph, session: Session) -> str:
    """DOT text of the graph with the session's path highlighted."""
    return render_dot(graph, highlight=path_of(session, graph))
