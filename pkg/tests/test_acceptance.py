"""Acceptance suite.

One test per shipping criterion; `pytest -v` prints one pass/fail line for
each. Everything runs offline against the deterministic mock provider.
"""
from __future__ import annotations

import json
import random
import threading
from dataclasses import replace

import pytest
from fastapi.testclient import TestClient

import gloss.service.store as store_module
from gloss.analysis.reports import cohort_summary, path_of
from gloss.authoring.dsl import parse_dsl, render_dsl
from gloss.authoring.jsonio import canonical_json, from_json, graph_to_dict, to_json
from gloss.authoring.templates import instantiate_template
from gloss.errors import IoFailureError, ProviderUnavailableError, VersionConflictError
from gloss.graph.model import (
    DialogueMode,
    NarrativeGraph,
    Provenance,
    ResponseIntent,
    SceneNode,
    TransitionEdge,
)
from gloss.graph.validation import error_diagnostics, validate
from gloss.llm.gateway import classify_intent
from gloss.llm.providers import MockProvider, Provider, jaccard, word_set
from gloss.service.app import ServiceSettings, create_app
from gloss.service.store import DocumentKind, DocumentStore
from gloss.session.engine import (
    GeneratedBranch,
    Matched,
    SessionStatus,
    start_session,
    submit_turn,
)
from gloss.session.serialize import session_to_dict
from conftest import FakeClock, random_graph, random_text
from oracles import oracle_jaccard, oracle_reachable, oracle_replay_path

MATCH_PATIENT = "I am sorry for the inconvenience"


def test_a1_graph_round_trip_identity_and_byte_stability():
    """1,000 pseudo-random graphs (<= 30 nodes): JSON round-trip identity,
    DSL semantic round-trip, canonical JSON byte-stable."""
    rng = random.Random(11)
    for i in range(1000):
        graph = random_graph(rng, max_nodes=30)

        text = to_json(graph)
        assert from_json(text) == graph, f"graph {i}: JSON round-trip changed the graph"
        assert to_json(from_json(text)) == text, f"graph {i}: canonical JSON not byte-stable"

        dsl_text = render_dsl(graph)
        parsed, diagnostics = parse_dsl(dsl_text)
        assert diagnostics == (), f"graph {i}: DSL re-parse reported {diagnostics[:2]}"
        assert parsed == replace(graph, version=1), f"graph {i}: DSL round-trip changed content"


def test_a2_validation_matches_reachability_oracle_and_error_fixtures():
    """500 random graphs (<= 20 nodes): W001 equals an independent
    reachability oracle; one hand-built fixture per error code."""
    rng = random.Random(22)
    for i in range(500):
        graph = random_graph(rng, max_nodes=20)
        expected_unreachable = set(graph.nodes) - set(oracle_reachable(graph))
        w001 = {d.subject for d in validate(graph) if d.code == "W001"}
        assert w001 == expected_unreachable, f"graph {i}: W001 disagrees with oracle"

    def raw(nodes, edges, start):
        return NarrativeGraph(
            id="g-fixture",
            title="Fixture",
            mode=DialogueMode.FLEXIBLE,
            start_node=start,
            nodes={n.id: n for n in nodes},
            edges=tuple(edges),
            version=1,
            metadata={},
        )

    def node(node_id):
        return SceneNode(id=node_id, avatar_utterance="hi")

    def edge(edge_id, src, dst, label):
        return TransitionEdge(
            id=edge_id,
            from_node=src,
            to_node=dst,
            intent=ResponseIntent(label=label),
            provenance=Provenance.AUTHORED,
        )

    fixtures = {
        "E001": raw([node("n0")], [], start="ghost"),
        "E002": raw([node("n0")], [edge("e1", "n0", "ghost", "a")], start="n0"),
        "E003": raw(
            [node("n0"), node("n1")],
            [edge("e1", "n0", "n1", "Same"), edge("e2", "n0", "n1", "sAME")],
            start="n0",
        ),
        "E004": raw(
            [node("n0"), node("n1")],
            [edge("e1", "n0", "n1", "a"), edge("e1", "n1", "n0", "b")],
            start="n0",
        ),
    }
    for code, graph in fixtures.items():
        found = {d.code for d in validate(graph) if d.severity.value == "error"}
        assert code in found, f"fixture for {code} produced {found or 'no errors'}"


def test_a3_mock_classification_agrees_with_independent_jaccard():
    """10,000 fuzzed pairs classified through the full mock path agree to
    full precision with an independent overlap implementation; the worked
    example scores 4/9."""
    provider = MockProvider()
    rng = random.Random(33)
    pool = "abcde XYZ .,!?;'\"\\ éüß 日本語 \U0001f642 0123 \t\n-"

    def fuzz():
        return "".join(rng.choice(pool) for _ in range(rng.randint(0, 24)))

    def candidate(example):
        return TransitionEdge(
            id="probe",
            from_node="n0",
            to_node="n1",
            intent=ResponseIntent(label="probe", examples=(example,)),
            provenance=Provenance.AUTHORED,
        )

    for i in range(10000):
        utterance, example = fuzz(), fuzz()
        matches = classify_intent(provider, utterance, [candidate(example)])
        expected = oracle_jaccard(utterance, example)
        assert matches[0].confidence == expected, (
            f"pair {i}: {utterance!r} vs {example!r} scored "
            f"{matches[0].confidence!r}, oracle says {expected!r}"
        )

    worked = jaccard(
        word_set("I am so sorry about the wait"),
        word_set("I am sorry for the inconvenience"),
    )
    assert abs(worked - 4 / 9) < 1e-9


def _play_script(graph, script, session_id):
    provider = MockProvider()
    clock = FakeClock()
    session = start_session(graph, session_id=session_id, clock=clock)
    for utterance in script:
        outcome = submit_turn(session, graph, provider, utterance, clock=clock)
        session, graph = outcome.session, outcome.graph
    return session, graph


def test_a4_session_replay_is_byte_identical():
    """Replaying a 10-turn script on the customer-service template twice
    yields byte-identical transcripts and final graph JSON."""
    graph = instantiate_template("customer-service")
    script = [MATCH_PATIENT] + [f"improvised reply number {i}" for i in range(9)]

    first_session, first_graph = _play_script(graph, script, session_id="s-replay")
    second_session, second_graph = _play_script(graph, script, session_id="s-replay")

    first_transcript = canonical_json(session_to_dict(first_session))
    second_transcript = canonical_json(session_to_dict(second_session))
    assert len(first_session.transcript) == 10
    assert first_transcript == second_transcript, "transcripts differ between replays"
    assert to_json(first_graph) == to_json(second_graph), "final graphs differ between replays"


def test_a5_mode_contract_under_random_scripts():
    """Any script: strict graphs never change version; flexible node/edge
    growth equals the GeneratedBranch count; zero post-session errors."""
    rng = random.Random(55)
    for i in range(60):
        graph = random_graph(rng, max_nodes=10)
        provider = MockProvider()
        clock = FakeClock()
        example_pool = [x for e in graph.edges for x in e.intent.examples]
        session = start_session(graph, session_id=f"s-mode-{i}", clock=clock)
        final_graph = graph
        for _ in range(rng.randint(1, 8)):
            if session.status is not SessionStatus.ACTIVE:
                break
            if example_pool and rng.random() < 0.5:
                utterance = rng.choice(example_pool)
            else:
                utterance = random_text(rng)
            outcome = submit_turn(session, final_graph, provider, utterance, clock=clock)
            session, final_graph = outcome.session, outcome.graph

        generated = sum(
            1 for t in session.transcript if isinstance(t.decision, GeneratedBranch)
        )
        if graph.mode is DialogueMode.STRICT:
            assert generated == 0, f"graph {i}: strict session generated branches"
            assert final_graph.version == graph.version, f"graph {i}: strict version moved"
            assert final_graph is graph
        else:
            assert len(final_graph.nodes) - len(graph.nodes) == generated
            assert len(final_graph.edges) - len(graph.edges) == generated
            assert final_graph.version == graph.version + generated
        assert error_diagnostics(final_graph) == (), f"graph {i}: errors after session"


def test_a6_path_replay_oracle_and_cohort_conservation():
    """100 random sessions: path_of equals an independent transcript replay;
    cohort edge counts sum to the matched+generated turn total."""
    rng = random.Random(66)
    sessions_done = 0
    while sessions_done < 100:
        graph = random_graph(rng, max_nodes=8)
        example_pool = [x for e in graph.edges for x in e.intent.examples]
        cohort = []
        final_graph = graph
        for k in range(rng.randint(1, 5)):
            provider = MockProvider()
            clock = FakeClock()
            session = start_session(
                final_graph, session_id=f"s-{sessions_done}", clock=clock
            )
            for _ in range(rng.randint(1, 6)):
                if session.status is not SessionStatus.ACTIVE:
                    break
                if example_pool and rng.random() < 0.5:
                    utterance = rng.choice(example_pool)
                else:
                    utterance = random_text(rng)
                outcome = submit_turn(session, final_graph, provider, utterance, clock=clock)
                session, final_graph = outcome.session, outcome.graph
            cohort.append(session)
            sessions_done += 1

        for session in cohort:
            expected = oracle_replay_path(session_to_dict(session), graph_to_dict(final_graph))
            assert list(path_of(session, final_graph)) == expected

        summary = cohort_summary(final_graph, cohort)
        moves = sum(
            1
            for session in cohort
            for t in session.transcript
            if isinstance(t.decision, (Matched, GeneratedBranch))
        )
        assert sum(summary.edge_counts.values()) == moves
        assert summary.sessions_total == len(cohort)


def test_a7_persistence_survives_kills_and_races(tmp_path):
    """Fault injection between temp-write and rename never leaves an
    unparseable document; concurrent CAS writers get exactly one winner."""
    store = DocumentStore(tmp_path)
    rng = random.Random(77)
    real_replace = store_module.os.replace
    doc_id = "g-fault"
    store.put(DocumentKind.GRAPH, doc_id, json.dumps({"version": 1, "n": 0}))
    last_good = 1
    try:
        for version in range(2, 60):
            kill = rng.random() < 0.5

            def injected(src, dst, _kill=kill):
                if _kill:
                    raise OSError("simulated kill between temp-write and rename")
                real_replace(src, dst)

            store_module.os.replace = injected
            try:
                store.put(
                    DocumentKind.GRAPH,
                    doc_id,
                    json.dumps({"version": version, "n": version}),
                    expected_version=last_good,
                )
                last_good = version
            except IoFailureError:
                pass
            finally:
                store_module.os.replace = real_replace
            body = store.get(DocumentKind.GRAPH, doc_id).body
            assert json.loads(body)["version"] == last_good
    finally:
        store_module.os.replace = real_replace
    leftovers = [p.name for p in (tmp_path / "graphs").iterdir() if p.name.startswith(".")]
    assert leftovers == [], f"temp files left behind: {leftovers}"

    store.put(DocumentKind.GRAPH, "g-race", json.dumps({"version": 1}))
    barrier = threading.Barrier(8)
    outcomes: list[str] = []
    lock = threading.Lock()

    def contender(worker):
        barrier.wait()
        try:
            store.put(
                DocumentKind.GRAPH,
                "g-race",
                json.dumps({"version": 2, "by": worker}),
                expected_version=1,
            )
            result = "won"
        except VersionConflictError:
            result = "lost"
        with lock:
            outcomes.append(result)

    threads = [threading.Thread(target=contender, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert outcomes.count("won") == 1, f"expected one CAS winner, saw {outcomes}"
    assert store.get(DocumentKind.GRAPH, "g-race").version == 2


class _DownProvider(Provider):
    def name(self):
        return "down"

    def complete(self, request):
        raise ProviderUnavailableError("wire cut")


class _GateProvider(Provider):
    def __init__(self):
        self.entered = threading.Event()
        self.release = threading.Event()
        self._inner = MockProvider()

    def name(self):
        return "gate"

    def complete(self, request):
        self.entered.set()
        assert self.release.wait(timeout=10)
        return self._inner.complete(request)


def test_a8_api_route_table_and_error_paths(tmp_path):
    """Full route table end-to-end with the mock provider: happy 201/200,
    404/409/422/502, and If-Match conflict behavior."""
    client = TestClient(create_app(ServiceSettings(data_dir=tmp_path, provider=MockProvider())))

    created = client.post("/graphs", json={"title": "Desk", "mode": "strict"})
    assert created.status_code == 201

    instantiated = client.post("/templates/customer-service/instantiate")
    assert instantiated.status_code == 201
    graph_id = instantiated.json()["id"]

    assert client.get("/graphs").status_code == 200
    assert client.get(f"/graphs/{graph_id}").status_code == 200
    assert client.get("/templates").status_code == 200
    assert client.get(f"/graphs/{graph_id}/validate").status_code == 200
    assert client.get(f"/graphs/{graph_id}/dot").status_code == 200

    generated = client.post("/graphs/generate", json={"prompt": "noisy neighbour"})
    assert generated.status_code == 201

    expanded = client.post(f"/graphs/{graph_id}/expand", json={"node_id": "n1", "instruction": "x"})
    assert expanded.status_code == 200
    assert expanded.json()["version"] == 2

    body = client.get(f"/graphs/{graph_id}").json()
    body["title"] = "Edited"
    put_ok = client.put(f"/graphs/{graph_id}", json=body, headers={"If-Match": "2"})
    assert put_ok.status_code == 200
    assert put_ok.json()["version"] == 3

    stale = client.put(f"/graphs/{graph_id}", json=body, headers={"If-Match": "2"})
    assert stale.status_code == 409
    assert stale.json()["code"] == "version_conflict"

    session = client.post("/sessions", json={"graph_id": graph_id})
    assert session.status_code == 201
    session_id = session.json()["session"]["id"]
    assert client.get(f"/sessions/{session_id}").status_code == 200

    matched = client.post(f"/sessions/{session_id}/turns", json={"utterance": MATCH_PATIENT})
    assert matched.status_code == 200
    assert matched.json()["turn"]["decision"]["kind"] == "matched"
    branched = client.post(f"/sessions/{session_id}/turns", json={"utterance": "zzz qqq"})
    assert branched.status_code == 200
    assert branched.json()["turn"]["decision"]["kind"] == "generated_branch"

    assert client.get(f"/graphs/{graph_id}/dot", params={"session": session_id}).status_code == 200
    assert client.get(f"/sessions/{session_id}/report").status_code == 200
    assert client.get(f"/graphs/{graph_id}/cohort-summary").status_code == 200
    assert client.post(f"/sessions/{session_id}/end").status_code == 200

    assert client.get("/graphs/ghost").status_code == 404
    assert client.get("/sessions/ghost").status_code == 404
    assert client.post("/templates/ghost/instantiate").status_code == 404

    bad_graph = graph_to_dict(instantiate_template("customer-service"))
    del bad_graph["version"]
    invalid = client.post("/graphs", json={"graph": bad_graph})
    assert invalid.status_code == 422
    assert invalid.json()["code"] == "validation_failed"
    empty = client.post(f"/sessions/{session_id}/turns", json={"utterance": "  "})
    assert empty.status_code == 422

    down = TestClient(create_app(ServiceSettings(data_dir=tmp_path, provider=_DownProvider())))
    live_session = client.post("/sessions", json={"graph_id": graph_id}).json()["session"]["id"]
    failed = down.post(f"/sessions/{live_session}/turns", json={"utterance": "hello"})
    assert failed.status_code == 502
    assert failed.json()["code"] == "provider_error"

    gate = _GateProvider()
    gated = TestClient(create_app(ServiceSettings(data_dir=tmp_path, provider=gate)))
    busy_session = gated.post("/sessions", json={"graph_id": graph_id}).json()["session"]["id"]
    slow = {}

    def slow_turn():
        slow["status"] = gated.post(
            f"/sessions/{busy_session}/turns", json={"utterance": MATCH_PATIENT}
        ).status_code

    worker = threading.Thread(target=slow_turn)
    worker.start()
    assert gate.entered.wait(timeout=10)
    busy = gated.post(f"/sessions/{busy_session}/turns", json={"utterance": "zzz"})
    assert busy.status_code == 409
    assert busy.json()["code"] == "session_busy"
    gate.release.set()
    worker.join(timeout=10)
    assert slow["status"] == 200

    assert client.delete(f"/graphs/{graph_id}").status_code == 200
    assert client.get(f"/graphs/{graph_id}").status_code == 404
