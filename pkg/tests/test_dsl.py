"""Text DSL: grammar, escapes, recovery, semantic checks, canonical render."""
from __future__ import annotations

import random
from dataclasses import replace

import pytest

from gloss.authoring.dsl import parse_dsl, render_dsl
from gloss.graph.model import DialogueMode, Provenance
from conftest import random_graph

SMOKE = '''\
graph "Demo" mode=flexible start=n0
node n0 avatar="Hello"
node n1 avatar="Bye" terminal=true
edge e1 n0 -> n1 intent=patient desc="stay calm" examples=["sorry for the wait"]
'''


def _ok(text):
    graph, diagnostics = parse_dsl(text)
    assert diagnostics == (), diagnostics
    assert graph is not None
    return graph


def _errors(text):
    graph, diagnostics = parse_dsl(text)
    assert graph is None
    assert diagnostics
    return diagnostics


def test_smoke_grammar():
    graph = _ok(SMOKE)
    assert graph.title == "Demo"
    assert graph.mode is DialogueMode.FLEXIBLE
    assert graph.start_node == "n0"
    assert set(graph.nodes) == {"n0", "n1"}
    assert graph.nodes["n1"].terminal is True
    edge = graph.edges[0]
    assert (edge.id, edge.from_node, edge.to_node) == ("e1", "n0", "n1")
    assert edge.intent.label == "patient"
    assert edge.intent.description == "stay calm"
    assert edge.intent.examples == ("sorry for the wait",)
    assert graph.version == 1


def test_full_line_comments_and_blank_lines():
    graph = _ok('# heading\n\ngraph "Demo" start=a\n   # indented comment\nnode a avatar="hi"\n')
    assert set(graph.nodes) == {"a"}


def test_header_id_round_trip():
    graph = _ok('graph "Demo" id=g-keep\nnode a avatar="hi"\n')
    assert graph.id == "g-keep"


def test_missing_start_defaults_to_first_declared_node():
    graph = _ok('graph "Demo"\nnode z avatar="hi"\nnode a avatar="ho"\n')
    assert graph.start_node == "z"


def test_string_escapes():
    graph = _ok('graph "Demo"\nnode a avatar="say \\"hi\\"\\n\\tend\\\\done\\r"\n')
    assert graph.nodes["a"].avatar_utterance == 'say "hi"\n\tend\\done\r'


def test_meta_lines():
    graph = _ok('graph "Demo"\nmeta topic="support"\nmeta "weird key"="v"\nnode a avatar="x"\n')
    assert graph.metadata == {"topic": "support", "weird key": "v"}


def test_provenance_attribute():
    graph = _ok(
        'graph "Demo"\nnode a avatar="x" prov=generated\nnode b avatar="y"\n'
        'edge e1 a -> b intent=go prov=template\n'
    )
    assert graph.nodes["a"].provenance is Provenance.GENERATED
    assert graph.edges[0].provenance is Provenance.TEMPLATE


def test_missing_header_reported_at_line_one():
    diags = _errors('node a avatar="x"\n')
    assert any(d.line == 1 and d.column == 1 and "header" in d.message for d in diags)


def test_unterminated_string_has_position():
    diags = _errors('graph "Demo"\nnode a avatar="oops\n')
    diag = next(d for d in diags if "unterminated" in d.message.lower())
    assert diag.line == 2


def test_duplicate_node_id_points_at_redeclaration():
    diags = _errors('graph "Demo"\nnode a avatar="x"\nnode a avatar="y"\n')
    diag = next(d for d in diags if "duplicate node id" in d.message)
    assert diag.line == 3


def test_duplicate_edge_id():
    diags = _errors(
        'graph "Demo"\nnode a avatar="x"\nnode b avatar="y"\n'
        'edge e1 a -> b intent=go\nedge e1 b -> a intent=back\n'
    )
    assert any("duplicate edge id" in d.message and d.line == 5 for d in diags)


def test_undeclared_endpoints_located_at_their_tokens():
    diags = _errors('graph "Demo"\nnode a avatar="x"\nedge e1 a -> ghost intent=go\n')
    diag = next(d for d in diags if "ghost" in d.message)
    assert diag.line == 3
    assert diag.column == 14


def test_duplicate_intent_label_casefolded():
    diags = _errors(
        'graph "Demo"\nnode a avatar="x"\nnode b avatar="y"\n'
        'edge e1 a -> b intent=Go\nedge e2 a -> b intent=gO\n'
    )
    assert any("already has an intent" in d.message and d.line == 5 for d in diags)


def test_undeclared_start_is_an_error():
    diags = _errors('graph "Demo" start=zz\nnode a avatar="x"\n')
    assert any("start" in d.message and d.line == 1 for d in diags)


def test_unknown_attribute_and_mode():
    diags = _errors('graph "Demo" mode=loose\nnode a avatar="x" shiny=true\n')
    assert any("unknown mode" in d.message for d in diags)
    assert any("unknown attribute" in d.message for d in diags)


def test_recovery_collects_errors_from_many_lines():
    text = (
        'graph "Demo"\n'
        'node a avatar="x"\n'
        "node\n"
        'node b avatar="y" avatar="z"\n'
        "edge e1 a > b intent=go\n"
        'node c avatar="ok"\n'
    )
    graph, diags = parse_dsl(text)
    assert graph is None
    assert len(diags) >= 3
    lines = {d.line for d in diags}
    assert {3, 4, 5} <= lines


def test_blank_input_reports_missing_header():
    diags = _errors("")
    assert any("header" in d.message for d in diags)


def test_render_requires_error_free_graph():
    from gloss.graph.model import NarrativeGraph

    broken = NarrativeGraph(
        id="g-x",
        title="X",
        mode=DialogueMode.FLEXIBLE,
        start_node="missing",
        nodes={},
        edges=(),
        version=1,
        metadata={},
    )
    with pytest.raises(ValueError):
        render_dsl(broken)


def test_render_is_canonical_and_parse_round_trips(rng):
    for _ in range(60):
        graph = random_graph(rng, max_nodes=10)
        text = render_dsl(graph)
        parsed, diags = parse_dsl(text)
        assert diags == ()
        assert parsed == replace(graph, version=1)
        assert render_dsl(parsed) == text


def test_render_quotes_only_when_needed():
    graph = _ok('graph "Demo"\nnode a avatar="plain"\nnode "has space" avatar="x"\n')
    text = render_dsl(graph)
    assert "node a avatar=" in text
    assert '"has space"' in text
