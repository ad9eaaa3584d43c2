"""Pure graph mutations.

``apply_mutation`` never touches the input snapshot: it validates the
request against the current state, then returns a new graph whose version
is exactly one higher. A failed mutation raises and leaves nothing behind.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Union

from gloss.errors import DuplicateIdError, DuplicateIntentLabelError, UnknownIdError
from gloss.graph.model import (
    DialogueMode,
    EdgeId,
    NarrativeGraph,
    NodeId,
    SceneNode,
    TransitionEdge,
)

# Ids minted for generated elements: "gen-" + zero-padded per-graph counter.
_GENERATED_ID = re.compile(r"^gen-(\d+)$")


@dataclass(frozen=True)
class AddNode:
    node: SceneNode


@dataclass(frozen=True)
class UpdateNode:
    node: SceneNode


@dataclass(frozen=True)
class RemoveNode:
    node_id: NodeId


@dataclass(frozen=True)
class AddEdge:
    edge: TransitionEdge


@dataclass(frozen=True)
class UpdateEdge:
    edge: TransitionEdge


@dataclass(frozen=True)
class RemoveEdge:
    edge_id: EdgeId


@dataclass(frozen=True)
class SetStart:
    node_id: NodeId


@dataclass(frozen=True)
class SetMode:
    mode: DialogueMode


@dataclass(frozen=True)
class AddBranch:
    """Append one new scene plus the edge leading to it as a single step.

    Used when a branch is grown at runtime or on request: the pair is
    indivisible, so the graph version moves by one per appended branch.
    ``edge.to_node`` must equal ``node.id``.
    """

    node: SceneNode
    edge: TransitionEdge


Mutation = Union[
    AddNode,
    UpdateNode,
    RemoveNode,
    AddEdge,
    UpdateEdge,
    RemoveEdge,
    SetStart,
    SetMode,
    AddBranch,
]


def _check_label_free(
    edges: tuple[TransitionEdge, ...], edge: TransitionEdge, *, ignore_id: str | None = None
) -> None:
    label = edge.intent.label.casefold()
    for other in edges:
        if other.id == ignore_id:
            continue
        if other.from_node == edge.from_node and other.intent.label.casefold() == label:
            raise DuplicateIntentLabelError(edge.from_node, edge.intent.label)


def _checked_new_edge(graph: NarrativeGraph, edge: TransitionEdge, nodes: dict[NodeId, SceneNode]) -> None:
    if any(e.id == edge.id for e in graph.edges):
        raise DuplicateIdError(edge.id)
    if edge.from_node not in nodes:
        raise UnknownIdError(edge.from_node, f"edge {edge.id!r}: unknown endpoint {edge.from_node!r}")
    if edge.to_node not in nodes:
        raise UnknownIdError(edge.to_node, f"edge {edge.id!r}: unknown endpoint {edge.to_node!r}")
    _check_label_free(graph.edges, edge)


def apply_mutation(graph: NarrativeGraph, mutation: Mutation) -> NarrativeGraph:
    """Apply one mutation and return the successor snapshot.

    Structural rules enforced here, so that every snapshot reachable through
    this function keeps referential integrity and id uniqueness:

    - adding reuses no existing id (DuplicateIdError);
    - updates and removals require the id to exist (UnknownIdError);
    - edge endpoints must exist (UnknownIdError);
    - no two outgoing edges of one node may share an intent label,
      compared case-insensitively (DuplicateIntentLabelError);
    - removing a node cascades to its incident edges;
    - the start node always exists while the graph is non-empty: the first
      added node becomes the start, and removing the current start falls
      back to the smallest remaining node id (or none).

    Raises:
        UnknownIdError, DuplicateIdError, DuplicateIntentLabelError
    """
    if isinstance(mutation, AddNode):
        node = mutation.node
        if node.id in graph.nodes:
            raise DuplicateIdError(node.id)
        nodes = {**graph.nodes, node.id: node}
        start = graph.start_node if graph.nodes else node.id
        result = replace(graph, nodes=nodes, start_node=start)

    elif isinstance(mutation, UpdateNode):
        node = mutation.node
        if node.id not in graph.nodes:
            raise UnknownIdError(node.id)
        result = replace(graph, nodes={**graph.nodes, node.id: node})

    elif isinstance(mutation, RemoveNode):
        node_id = mutation.node_id
        if node_id not in graph.nodes:
            raise UnknownIdError(node_id)
        nodes = {k: v for k, v in graph.nodes.items() if k != node_id}
        edges = tuple(e for e in graph.edges if node_id not in (e.from_node, e.to_node))
        start = graph.start_node
        if start == node_id:
            start = min(nodes) if nodes else None
        result = replace(graph, nodes=nodes, edges=edges, start_node=start)

    elif isinstance(mutation, AddEdge):
        edge = mutation.edge
        _checked_new_edge(graph, edge, graph.nodes)
        result = replace(graph, edges=graph.edges + (edge,))

    elif isinstance(mutation, UpdateEdge):
        edge = mutation.edge
        if not any(e.id == edge.id for e in graph.edges):
            raise UnknownIdError(edge.id)
        if edge.from_node not in graph.nodes:
            raise UnknownIdError(edge.from_node, f"edge {edge.id!r}: unknown endpoint {edge.from_node!r}")
        if edge.to_node not in graph.nodes:
            raise UnknownIdError(edge.to_node, f"edge {edge.id!r}: unknown endpoint {edge.to_node!r}")
        _check_label_free(graph.edges, edge, ignore_id=edge.id)
        result = replace(
            graph, edges=tuple(edge if e.id == edge.id else e for e in graph.edges)
        )

    elif isinstance(mutation, RemoveEdge):
        if not any(e.id == mutation.edge_id for e in graph.edges):
            raise UnknownIdError(mutation.edge_id)
        result = replace(
            graph, edges=tuple(e for e in graph.edges if e.id != mutation.edge_id)
        )

    elif isinstance(mutation, SetStart):
        if mutation.node_id not in graph.nodes:
            raise UnknownIdError(mutation.node_id)
        result = replace(graph, start_node=mutation.node_id)

    elif isinstance(mutation, SetMode):
        result = replace(graph, mode=mutation.mode)

    elif isinstance(mutation, AddBranch):
        node, edge = mutation.node, mutation.edge
        if edge.to_node != node.id:
            raise UnknownIdError(edge.to_node, "branch edge must point at the branch node")
        if node.id in graph.nodes:
            raise DuplicateIdError(node.id)
        nodes = {**graph.nodes, node.id: node}
        _checked_new_edge(graph, edge, nodes)
        start = graph.start_node if graph.nodes else node.id
        result = replace(graph, nodes=nodes, edges=graph.edges + (edge,), start_node=start)

    else:
        raise TypeError(f"unsupported mutation: {mutation!r}")

    return replace(result, version=graph.version + 1)


def _next_generated(ids: list[str]) -> str:
    highest = 0
    for element_id in ids:
        match = _GENERATED_ID.match(element_id)
        if match:
            highest = max(highest, int(match.group(1)))
    return f"gen-{highest + 1:03d}"


def next_generated_node_id(graph: NarrativeGraph) -> NodeId:
    """Next free generated node id for this graph (scan-based, so it is
    stable across serialization round trips)."""
    return _next_generated(list(graph.nodes))


def next_generated_edge_id(graph: NarrativeGraph) -> EdgeId:
    """Next free generated edge id for this graph."""
    return _next_generated([e.id for e in graph.edges])
