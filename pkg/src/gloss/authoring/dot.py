"""Graphviz DOT export.

Output is deterministic: fixed preamble, nodes sorted by id, edges in
insertion order. Node labels show the scene id plus the first 40
characters of the avatar utterance; edge labels show the intent label.
Highlighted elements (for example a session path) get ``penwidth=3``.
"""
from __future__ import annotations

from typing import Iterable

from gloss.errors import UnknownIdError
from gloss.graph.model import NarrativeGraph

# Longer avatar text is cut at this many characters in node labels.
_LABEL_PREFIX = 40


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\r\n", "\\n")
        .replace("\n", "\\n")
        .replace("\r", "\\n")
    )


def render_dot(graph: NarrativeGraph, highlight: Iterable[str] = ()) -> str:
    """Render the graph as DOT text.

    Args:
        graph: Snapshot to draw.
        highlight: Node and edge ids to emphasise with ``penwidth=3``.

    Raises:
        UnknownIdError: If a highlight id is neither a node nor an edge.
    """
    marked = set(highlight)
    known = set(graph.nodes) | {e.id for e in graph.edges}
    for element_id in sorted(marked):
        if element_id not in known:
            raise UnknownIdError(element_id, f"highlight id {element_id!r} is not in the graph")

    lines = ["digraph G {", "  rankdir=LR;"]
    for node in sorted(graph.nodes.values(), key=lambda n: n.id):
        label = _escape(f"{node.id}: {node.avatar_utterance[:_LABEL_PREFIX]}")
        attrs = [f'label="{label}"']
        if node.terminal:
            attrs.append("shape=doublecircle")
        if node.id in marked:
            attrs.append("penwidth=3")
        lines.append(f'  "{_escape(node.id)}" [{", ".join(attrs)}];')
    for edge in graph.edges:
        attrs = [f'label="{_escape(edge.intent.label)}"']
        if edge.id in marked:
            attrs.append("penwidth=3")
        lines.append(
            f'  "{_escape(edge.from_node)}" -> "{_escape(edge.to_node)}" [{", ".join(attrs)}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
