"""Read-only analysis over finished or in-flight sessions."""
from gloss.analysis.reports import (
    CohortSummary,
    PerTurn,
    SessionReport,
    cohort_summary,
    overlay_dot,
    path_of,
    session_report,
)

__all__ = [
    "CohortSummary",
    "PerTurn",
    "SessionReport",
    "cohort_summary",
    "overlay_dot",
    "path_of",
    "session_report",
]
