"""Provider-backed authoring: whole-graph generation and node expansion.

Generation asks the provider for a document in the same JSON schema used
for persistence, so one decoder and one validator serve both paths. A
payload that fails decoding or validation is retried once through the
gateway's repair mechanism, then rejected.
"""
from __future__ import annotations

from dataclasses import replace
from typing import Any

from gloss.errors import UnknownIdError
from gloss.graph.model import (
    NarrativeGraph,
    Provenance,
    ResponseIntent,
    SceneNode,
    TransitionEdge,
    fresh_graph_id,
    outgoing_edges,
)
from gloss.graph.mutations import (
    AddBranch,
    apply_mutation,
    next_generated_edge_id,
    next_generated_node_id,
)
from gloss.graph.validation import error_diagnostics
from gloss.llm.gateway import generate_payload, propose_branch
from gloss.llm.providers import Provider

from gloss.authoring.jsonio import graph_from_dict


def _as_generated(graph: NarrativeGraph) -> NarrativeGraph:
    nodes = {
        node_id: replace(node, provenance=Provenance.GENERATED)
        for node_id, node in graph.nodes.items()
    }
    edges = tuple(replace(edge, provenance=Provenance.GENERATED) for edge in graph.edges)
    return replace(graph, id=fresh_graph_id(), version=1, nodes=nodes, edges=edges)


def _decode_generated(payload: Any) -> NarrativeGraph:
    graph = _as_generated(graph_from_dict(payload, lenient=True))
    errors = error_diagnostics(graph)
    if errors:
        summary = ", ".join(f"{d.code} {d.subject}: {d.message}" for d in errors)
        raise ValueError(f"generated graph fails validation: {summary}")
    return graph


def generate_graph(provider: Provider, prompt: str) -> NarrativeGraph:
    """Draft a whole scenario from a plain-language prompt.

    The result has a fresh id, version 1, generated provenance on every
    element, and no error-severity diagnostics.

    Args:
        provider: Completion backend.
        prompt: Non-empty scenario request, e.g. "angry customer refund".

    Raises:
        ValueError: If the prompt is empty.
        MalformedGenerationError: If the provider output stayed unusable
            after one repair retry.
        ProviderError: On transport failure.
    """
    if not prompt.strip():
        raise ValueError("prompt must be non-empty")
    return generate_payload(provider, prompt, decode=_decode_generated)


def expand_node(
    provider: Provider, graph: NarrativeGraph, node_id: str, instruction: str
) -> NarrativeGraph:
    """Grow one new branch (edge plus scene) under an existing node.

    The new elements carry generated provenance and "gen-" ids; the
    proposal's intent label is already collision-free against the node's
    outgoing labels. The graph version moves by one per appended branch.

    Raises:
        UnknownIdError: If ``node_id`` is not in the graph.
        MalformedGenerationError: If the proposal stayed unusable after
            the repair retry.
        ProviderError: On transport failure.
    """
    node = graph.nodes.get(node_id)
    if node is None:
        raise UnknownIdError(node_id, f"unknown node: {node_id!r}")
    existing = [edge.intent.label for edge in outgoing_edges(graph, node_id)]
    proposal = propose_branch(provider, node, instruction, existing)
    new_node = SceneNode(
        id=next_generated_node_id(graph),
        avatar_utterance=proposal.avatar_reply,
        description=proposal.scene_description,
        terminal=proposal.terminal,
        provenance=Provenance.GENERATED,
    )
    new_edge = TransitionEdge(
        id=next_generated_edge_id(graph),
        from_node=node_id,
        to_node=new_node.id,
        intent=ResponseIntent(
            label=proposal.intent_label,
            description=proposal.intent_description,
            examples=(),
        ),
        provenance=Provenance.GENERATED,
    )
    return apply_mutation(graph, AddBranch(node=new_node, edge=new_edge))
