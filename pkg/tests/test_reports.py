"""Analysis: path reconstruction, per-session reports, cohort aggregation."""
from __future__ import annotations

import random
from dataclasses import replace

import pytest

from gloss.analysis.reports import (
    cohort_summary,
    overlay_dot,
    path_of,
    session_report,
)
from gloss.authoring.jsonio import graph_to_dict
from gloss.authoring.templates import instantiate_template
from gloss.errors import InconsistentTranscriptError
from gloss.llm.providers import MockProvider
from gloss.session.engine import GeneratedBranch, Matched, start_session, submit_turn
from gloss.session.serialize import session_to_dict
from conftest import FakeClock
from oracles import oracle_replay_path

MATCH_PATIENT = "I am sorry for the inconvenience"


def _play(script, graph=None, threshold=0.5):
    graph = graph or instantiate_template("customer-service")
    clock = FakeClock()
    provider = MockProvider()
    session = start_session(graph, threshold, clock=clock)
    for utterance in script:
        outcome = submit_turn(session, graph, provider, utterance, clock=clock)
        session, graph = outcome.session, outcome.graph
    return session, graph


def test_path_of_matched_only():
    session, graph = _play([MATCH_PATIENT, "I will process the refund right now today"])
    assert path_of(session, graph) == ("n0", "e1", "n1", "e4", "n4")


def test_path_of_with_generated_branches():
    session, graph = _play([MATCH_PATIENT, "zzz qqq"])
    assert path_of(session, graph) == ("n0", "e1", "n1", "gen-001", "gen-001")


def test_path_of_rejected_stays_in_place():
    graph = instantiate_template("job-interview")
    session, graph = _play(["zzz"], graph=graph)
    assert path_of(session, graph) == (graph.start_node,)


def test_path_of_checks_graph_identity():
    session, graph = _play([MATCH_PATIENT])
    other = instantiate_template("customer-service")
    with pytest.raises(InconsistentTranscriptError):
        path_of(session, other)


def test_path_of_detects_severed_transcripts():
    session, graph = _play([MATCH_PATIENT])
    pruned = replace(graph, edges=tuple(e for e in graph.edges if e.id != "e1"))
    with pytest.raises(InconsistentTranscriptError):
        path_of(session, pruned)


def test_path_matches_independent_replay(rng):
    for _ in range(20):
        script = [
            rng.choice([MATCH_PATIENT, "zzz qqq", "let me see", "calm words here"])
            for _ in range(rng.randint(1, 6))
        ]
        session, graph = _play(script, threshold=rng.choice([0.3, 0.5, 0.8]))
        expected = oracle_replay_path(session_to_dict(session), graph_to_dict(graph))
        assert list(path_of(session, graph)) == expected


def test_session_report_counts():
    session, graph = _play([MATCH_PATIENT, "zzz qqq", "www eee"])
    report = session_report(session)
    assert report.session_id == session.id
    assert report.turns_total == 3
    assert report.matched_count == 1
    assert report.generated_count == 2
    assert report.rejected_count == 0
    assert report.completed is False
    assert report.mean_confidence_of_matched == pytest.approx(1.0)
    assert [t.kind for t in report.per_turn] == ["matched", "generated_branch", "generated_branch"]
    assert all(t.feedback.startswith("Mock feedback") for t in report.per_turn)


def test_session_report_mean_defaults_to_zero():
    graph = instantiate_template("job-interview")
    session, _ = _play(["zzz"], graph=graph)
    report = session_report(session)
    assert report.rejected_count == 1
    assert report.mean_confidence_of_matched == 0.0


def test_report_to_dict_is_json_ready():
    import json

    session, _ = _play([MATCH_PATIENT])
    payload = session_report(session).to_dict()
    json.dumps(payload)
    assert payload["turns_total"] == 1


def test_cohort_summary_conservation(rng):
    graph = instantiate_template("customer-service")
    sessions = []
    total_moves = 0
    for _ in range(8):
        script = [rng.choice([MATCH_PATIENT, "zzz qqq"]) for _ in range(rng.randint(1, 4))]
        clock = FakeClock()
        provider = MockProvider()
        session = start_session(graph, clock=clock)
        for utterance in script:
            outcome = submit_turn(session, graph, provider, utterance, clock=clock)
            session, graph = outcome.session, outcome.graph
        sessions.append(session)
        total_moves += sum(
            1 for t in session.transcript if isinstance(t.decision, (Matched, GeneratedBranch))
        )
    summary = cohort_summary(graph, sessions)
    assert summary.sessions_total == len(sessions)
    assert sum(summary.edge_counts.values()) == total_moves
    assert summary.node_visits[graph.start_node] >= len(sessions)


def test_cohort_summary_zero_fills_untraversed():
    graph = instantiate_template("customer-service")
    summary = cohort_summary(graph, [])
    assert set(summary.edge_counts) == {e.id for e in graph.edges}
    assert set(summary.node_visits) == set(graph.nodes)
    assert all(v == 0 for v in summary.edge_counts.values())
    assert all(v == 0 for v in summary.node_visits.values())


def test_cohort_summary_rejects_foreign_sessions():
    graph = instantiate_template("customer-service")
    session, _ = _play([MATCH_PATIENT])
    with pytest.raises(InconsistentTranscriptError):
        cohort_summary(graph, [session])


def test_overlay_dot_highlights_path():
    session, graph = _play([MATCH_PATIENT])
    text = overlay_dot(graph, session)
    assert '"n0" -> "n1" [label="patient", penwidth=3];' in text
    assert 'label="n0' in text
    n0_line = next(l for l in text.splitlines() if l.startswith('  "n0" ['))
    assert "penwidth=3" in n0_line
    n2_line = next(l for l in text.splitlines() if l.startswith('  "n2" ['))
    assert "penwidth" not in n2_line
