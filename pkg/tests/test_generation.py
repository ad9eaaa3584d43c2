"""Model-assisted authoring: whole-graph generation and node expansion."""
from __future__ import annotations

import json

import pytest

from gloss.authoring.generate import expand_node, generate_graph
from gloss.authoring.templates import instantiate_template
from gloss.errors import MalformedGenerationError, UnknownIdError
from gloss.graph.model import Provenance, outgoing_edges
from gloss.graph.validation import error_diagnostics, validate
from gloss.llm.providers import MockProvider
from test_gateway import ScriptedProvider


def test_generate_graph_is_valid_and_generated():
    graph = generate_graph(MockProvider(), "angry customer at a kiosk")
    assert validate(graph) == ()
    assert graph.version == 1
    assert graph.title == "angry customer at a kiosk"
    assert graph.start_node == "n0"
    assert all(n.provenance is Provenance.GENERATED for n in graph.nodes.values())
    assert all(e.provenance is Provenance.GENERATED for e in graph.edges)


def test_generate_graph_ids_are_fresh():
    a = generate_graph(MockProvider(), "same prompt")
    b = generate_graph(MockProvider(), "same prompt")
    assert a.id != b.id
    assert a.nodes == b.nodes


def test_generate_graph_rejects_blank_prompt():
    with pytest.raises(ValueError):
        generate_graph(MockProvider(), "   ")


def test_generate_graph_repairs_invalid_payload():
    bad = json.dumps({"title": "x", "nodes": [], "edges": []})
    good = json.dumps(
        {
            "title": "x",
            "start_node": "n0",
            "nodes": [{"id": "n0", "avatar_utterance": "hi"}],
            "edges": [],
        }
    )
    provider = ScriptedProvider(bad, good)
    graph = generate_graph(provider, "x")
    assert set(graph.nodes) == {"n0"}
    assert len(provider.requests) == 2


def test_generate_graph_fails_after_two_invalid_payloads():
    bad = json.dumps({"title": "x", "nodes": [], "edges": []})
    with pytest.raises(MalformedGenerationError):
        generate_graph(ScriptedProvider(bad, bad), "x")


def test_expand_node_appends_branch_once():
    graph = instantiate_template("customer-service")
    before = graph.version
    grown = expand_node(MockProvider(), graph, "n1", "add a de-escalation")
    assert grown.version == before + 1
    assert "gen-001" in grown.nodes
    new_edge = grown.edges[-1]
    assert new_edge.id == "gen-001"
    assert new_edge.from_node == "n1"
    assert new_edge.to_node == "gen-001"
    assert new_edge.provenance is Provenance.GENERATED
    assert grown.nodes["gen-001"].provenance is Provenance.GENERATED
    assert error_diagnostics(grown) == ()
    assert any(d.code == "W003" and d.subject == "gen-001" for d in validate(grown))


def test_expand_node_avoids_label_collisions():
    graph = instantiate_template("customer-service")
    grown = expand_node(MockProvider(), graph, "n0", "another option")
    labels = [e.intent.label for e in outgoing_edges(grown, "n0")]
    assert len({l.casefold() for l in labels}) == len(labels)


def test_expand_node_allocates_sequential_ids():
    graph = instantiate_template("customer-service")
    provider = MockProvider()
    grown = expand_node(provider, graph, "n1", "one")
    grown = expand_node(provider, grown, "n1", "two")
    assert "gen-001" in grown.nodes and "gen-002" in grown.nodes


def test_expand_unknown_node():
    with pytest.raises(UnknownIdError):
        expand_node(MockProvider(), instantiate_template("customer-service"), "ghost", "x")
