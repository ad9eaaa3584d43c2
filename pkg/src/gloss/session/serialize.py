"""JSON form of sessions and turns.

Session document layout (stable contract):

    {
      "id": str, "graph_id": str, "graph_version_at_start": int,
      "current_node": str, "status": "active"|"completed",
      "threshold": number, "created_at": str,
      "transcript": [
        {"index": int, "student_utterance": str,
         "decision": {"kind": "matched", "edge_id": str, "confidence": number}
                   | {"kind": "generated_branch", "new_edge_id": str, "new_node_id": str}
                   | {"kind": "rejected", "best_confidence": number, "hint": str},
         "avatar_reply": str, "feedback": str,
         "from_node": str, "to_node": str, "at": str}
      ]
    }

Stored copies carry one extra integer field, ``version``: the document
revision the service bumps on every write. It is ignored when decoding.
"""
from __future__ import annotations

from typing import Any

from gloss.errors import SchemaViolationError
from gloss.session.engine import (
    GeneratedBranch,
    MatchDecision,
    Matched,
    Rejected,
    Session,
    SessionStatus,
    Turn,
)


def decision_to_dict(decision: MatchDecision) -> dict[str, Any]:
    if isinstance(decision, Matched):
        return {"kind": "matched", "edge_id": decision.edge_id, "confidence": decision.confidence}
    if isinstance(decision, GeneratedBranch):
        return {
            "kind": "generated_branch",
            "new_edge_id": decision.new_edge_id,
            "new_node_id": decision.new_node_id,
        }
    return {
        "kind": "rejected",
        "best_confidence": decision.best_confidence,
        "hint": decision.hint,
    }


def turn_to_dict(turn: Turn) -> dict[str, Any]:
    return {
        "index": turn.index,
        "student_utterance": turn.student_utterance,
        "decision": decision_to_dict(turn.decision),
        "avatar_reply": turn.avatar_reply,
        "feedback": turn.feedback,
        "from_node": turn.from_node,
        "to_node": turn.to_node,
        "at": turn.at,
    }


def session_to_dict(session: Session) -> dict[str, Any]:
    return {
        "id": session.id,
        "graph_id": session.graph_id,
        "graph_version_at_start": session.graph_version_at_start,
        "current_node": session.current_node,
        "status": session.status.value,
        "threshold": session.match_threshold,
        "created_at": session.created_at,
        "transcript": [turn_to_dict(t) for t in session.transcript],
    }


def _require(obj: dict, key: str, kind: type, path: str) -> Any:
    if key not in obj:
        raise SchemaViolationError(f"{path}/{key}", "missing required field")
    value = obj[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaViolationError(f"{path}/{key}", "expected a number")
        return float(value)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise SchemaViolationError(f"{path}/{key}", f"expected {kind.__name__}")
    return value


def decision_from_dict(payload: Any, path: str) -> MatchDecision:
    if not isinstance(payload, dict):
        raise SchemaViolationError(path, "expected an object")
    kind = _require(payload, "kind", str, path)
    if kind == "matched":
        return Matched(
            edge_id=_require(payload, "edge_id", str, path),
            confidence=_require(payload, "confidence", float, path),
        )
    if kind == "generated_branch":
        return GeneratedBranch(
            new_edge_id=_require(payload, "new_edge_id", str, path),
            new_node_id=_require(payload, "new_node_id", str, path),
        )
    if kind == "rejected":
        return Rejected(
            best_confidence=_require(payload, "best_confidence", float, path),
            hint=_require(payload, "hint", str, path),
        )
    raise SchemaViolationError(f"{path}/kind", f"unknown decision kind {kind!r}")


def turn_from_dict(payload: Any, path: str) -> Turn:
    if not isinstance(payload, dict):
        raise SchemaViolationError(path, "expected an object")
    return Turn(
        index=_require(payload, "index", int, path),
        student_utterance=_require(payload, "student_utterance", str, path),
        decision=decision_from_dict(payload.get("decision"), f"{path}/decision"),
        avatar_reply=_require(payload, "avatar_reply", str, path),
        feedback=_require(payload, "feedback", str, path),
        from_node=_require(payload, "from_node", str, path),
        to_node=_require(payload, "to_node", str, path),
        at=_require(payload, "at", str, path),
    )


def session_from_dict(payload: Any) -> Session:
    """Decode a session document; the stored ``version`` field, if present,
    is ignored.

    Raises:
        SchemaViolationError: With a JSON-pointer style path to the fault.
    """
    if not isinstance(payload, dict):
        raise SchemaViolationError("", "expected an object")
    status_text = _require(payload, "status", str, "")
    try:
        status = SessionStatus(status_text)
    except ValueError:
        raise SchemaViolationError("/status", f"unknown status {status_text!r}") from None
    transcript_raw = _require(payload, "transcript", list, "")
    transcript = tuple(
        turn_from_dict(item, f"/transcript/{i}") for i, item in enumerate(transcript_raw)
    )
    return Session(
        id=_require(payload, "id", str, ""),
        graph_id=_require(payload, "graph_id", str, ""),
        graph_version_at_start=_require(payload, "graph_version_at_start", int, ""),
        current_node=_require(payload, "current_node", str, ""),
        transcript=transcript,
        status=status,
        match_threshold=_require(payload, "threshold", float, ""),
        created_at=_require(payload, "created_at", str, ""),
    )
