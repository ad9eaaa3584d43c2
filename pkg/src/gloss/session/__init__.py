"""Session state machine and its JSON form."""
from gloss.session.engine import (
    DEFAULT_MATCH_THRESHOLD,
    GeneratedBranch,
    MatchDecision,
    Matched,
    NoMatch,
    Rejected,
    Session,
    SessionStatus,
    Turn,
    TurnOutcome,
    end_session,
    resolve_match,
    start_session,
    submit_turn,
    utc_now,
)
from gloss.session.serialize import (
    decision_from_dict,
    decision_to_dict,
    session_from_dict,
    session_to_dict,
    turn_from_dict,
    turn_to_dict,
)

__all__ = [
    "DEFAULT_MATCH_THRESHOLD",
    "GeneratedBranch",
    "MatchDecision",
    "Matched",
    "NoMatch",
    "Rejected",
    "Session",
    "SessionStatus",
    "Turn",
    "TurnOutcome",
    "decision_from_dict",
    "decision_to_dict",
    "end_session",
    "resolve_match",
    "session_from_dict",
    "session_to_dict",
    "start_session",
    "submit_turn",
    "turn_from_dict",
    "turn_to_dict",
    "utc_now",
]
