"""Structural validation of narrative graphs.

``validate`` is a pure report: it never mutates the graph and returns the
same diagnostics for the same snapshot. Errors mark graphs that cannot run
a session; warnings mark authoring smells that are legal to save.

Codes:
    E001  missing or invalid start node
    E002  edge endpoint does not exist
    E003  duplicate intent labels on one node (case-insensitive)
    E004  duplicate element id
    W001  node unreachable from the start node
    W002  terminal node has outgoing edges
    W003  non-terminal node has no outgoing edges
"""
from __future__ import annotations

from collections import Counter, deque

from gloss.graph.model import Diagnostic, NarrativeGraph, NodeId, Severity


def reachable_nodes(graph: NarrativeGraph) -> frozenset[NodeId]:
    """Breadth-first reachable set from the start node.

    Empty when the start node is missing or invalid. Edges with a dangling
    endpoint are not traversable.
    """
    if graph.start_node is None or graph.start_node not in graph.nodes:
        return frozenset()
    seen = {graph.start_node}
    queue = deque([graph.start_node])
    while queue:
        current = queue.popleft()
        for edge in graph.edges:
            if edge.from_node == current and edge.to_node in graph.nodes:
                if edge.to_node not in seen:
                    seen.add(edge.to_node)
                    queue.append(edge.to_node)
    return frozenset(seen)


def validate(graph: NarrativeGraph) -> tuple[Diagnostic, ...]:
    """Report structural problems, ordered by (code, subject, message)."""
    found: list[Diagnostic] = []

    start_ok = (graph.start_node is None and not graph.nodes) or (
        graph.start_node in graph.nodes
    )
    if not start_ok:
        found.append(
            Diagnostic(
                code="E001",
                severity=Severity.ERROR,
                message=f"start node {graph.start_node!r} is not a node of the graph",
                subject=graph.id,
            )
        )

    for edge in graph.edges:
        for endpoint in (edge.from_node, edge.to_node):
            if endpoint not in graph.nodes:
                found.append(
                    Diagnostic(
                        code="E002",
                        severity=Severity.ERROR,
                        message=f"edge {edge.id!r} references missing node {endpoint!r}",
                        subject=edge.id,
                    )
                )

    label_counts: Counter[tuple[str, str]] = Counter(
        (edge.from_node, edge.intent.label.casefold()) for edge in graph.edges
    )
    for (node_id, label), count in sorted(label_counts.items()):
        if count > 1 and node_id in graph.nodes:
            found.append(
                Diagnostic(
                    code="E003",
                    severity=Severity.ERROR,
                    message=f"node {node_id!r} has {count} outgoing edges labelled {label!r}",
                    subject=node_id,
                )
            )

    edge_id_counts = Counter(edge.id for edge in graph.edges)
    for edge_id, count in sorted(edge_id_counts.items()):
        if count > 1:
            found.append(
                Diagnostic(
                    code="E004",
                    severity=Severity.ERROR,
                    message=f"edge id {edge_id!r} appears {count} times",
                    subject=edge_id,
                )
            )

    reached = reachable_nodes(graph)
    for node_id in graph.nodes:
        if node_id not in reached:
            found.append(
                Diagnostic(
                    code="W001",
                    severity=Severity.WARNING,
                    message=f"node {node_id!r} is unreachable from the start node",
                    subject=node_id,
                )
            )

    out_degree = Counter(edge.from_node for edge in graph.edges)
    for node_id, node in graph.nodes.items():
        if node.terminal and out_degree[node_id]:
            found.append(
                Diagnostic(
                    code="W002",
                    severity=Severity.WARNING,
                    message=f"terminal node {node_id!r} has outgoing edges",
                    subject=node_id,
                )
            )
        elif not node.terminal and not out_degree[node_id]:
            found.append(
                Diagnostic(
                    code="W003",
                    severity=Severity.WARNING,
                    message=f"non-terminal node {node_id!r} has no outgoing edges",
                    subject=node_id,
                )
            )

    return tuple(sorted(found, key=lambda d: (d.code, d.subject, d.message)))


def error_diagnostics(graph: NarrativeGraph) -> tuple[Diagnostic, ...]:
    """Only the error-severity findings of ``validate``."""
    return tuple(d for d in validate(graph) if d.severity == Severity.ERROR)
