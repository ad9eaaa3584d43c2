"""Narrative graph core: value types, pure mutations, validation."""
from gloss.graph.model import (
    Diagnostic,
    DialogueMode,
    EdgeId,
    NarrativeGraph,
    NodeId,
    Provenance,
    ResponseIntent,
    SceneNode,
    Severity,
    TransitionEdge,
    fresh_graph_id,
    new_graph,
    outgoing_edges,
)
from gloss.graph.mutations import (
    AddBranch,
    AddEdge,
    AddNode,
    Mutation,
    RemoveEdge,
    RemoveNode,
    SetMode,
    SetStart,
    UpdateEdge,
    UpdateNode,
    apply_mutation,
    next_generated_edge_id,
    next_generated_node_id,
)
from gloss.graph.validation import error_diagnostics, reachable_nodes, validate

__all__ = [
    "AddBranch",
    "AddEdge",
    "AddNode",
    "Diagnostic",
    "DialogueMode",
    "EdgeId",
    "Mutation",
    "NarrativeGraph",
    "NodeId",
    "Provenance",
    "RemoveEdge",
    "RemoveNode",
    "ResponseIntent",
    "SceneNode",
    "SetMode",
    "SetStart",
    "Severity",
    "TransitionEdge",
    "UpdateEdge",
    "UpdateNode",
    "apply_mutation",
    "error_diagnostics",
    "fresh_graph_id",
    "new_graph",
    "next_generated_edge_id",
    "next_generated_node_id",
    "outgoing_edges",
    "reachable_nodes",
    "validate",
]
