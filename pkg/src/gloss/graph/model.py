"""Value types for narrative graphs.

A narrative graph is an immutable snapshot: scenes (nodes) voiced by the
avatar, and transitions (edges) labelled with the student response intent
that triggers them. All edits go through ``gloss.graph.mutations`` which
returns a new snapshot with the version bumped; nothing here mutates in
place.
"""
from __future__ import annotations

import uuid
from dataclasses import dataclass
from enum import Enum

from gloss.errors import EmptyTitleError, UnknownIdError

NodeId = str
EdgeId = str


class DialogueMode(str, Enum):
    """How a session treats student utterances that match no authored intent."""

    STRICT = "strict"
    FLEXIBLE = "flexible"


class Provenance(str, Enum):
    """Who put an element into the graph."""

    AUTHORED = "authored"
    GENERATED = "generated"
    TEMPLATE = "template"


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class ResponseIntent:
    """A student response category: short label, free-text description,
    and example utterances used for matching."""

    label: str
    description: str = ""
    examples: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("intent label must be non-empty")
        if "\n" in self.label or "\r" in self.label:
            raise ValueError("intent label must not contain newlines")


@dataclass(frozen=True)
class SceneNode:
    """One scene: what the avatar says when the conversation arrives here."""

    id: NodeId
    avatar_utterance: str
    description: str = ""
    terminal: bool = False
    provenance: Provenance = Provenance.AUTHORED

    def __post_init__(self) -> None:
        if not self.id.strip():
            raise ValueError("node id must be non-blank")
        if not self.avatar_utterance:
            raise ValueError(f"node {self.id!r}: avatar_utterance must be non-empty")


@dataclass(frozen=True)
class TransitionEdge:
    """A directed transition taken when the student's reply matches ``intent``."""

    id: EdgeId
    from_node: NodeId
    to_node: NodeId
    intent: ResponseIntent
    provenance: Provenance = Provenance.AUTHORED

    def __post_init__(self) -> None:
        if not self.id.strip():
            raise ValueError("edge id must be non-blank")
        if not self.from_node.strip() or not self.to_node.strip():
            raise ValueError(f"edge {self.id!r}: endpoints must be non-blank")


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding. ``subject`` is the id of the element at fault."""

    code: str
    severity: Severity
    message: str
    subject: str


@dataclass(frozen=True)
class NarrativeGraph:
    """Immutable snapshot of a whole scenario.

    ``nodes`` is keyed by node id; ``edges`` keeps author insertion order,
    which is also the candidate order presented during matching. ``version``
    starts at 1 and increases by exactly one per applied mutation. Treat all
    contained collections as read-only.
    """

    id: str
    title: str
    mode: DialogueMode
    start_node: NodeId | None
    nodes: dict[NodeId, SceneNode]
    edges: tuple[TransitionEdge, ...]
    version: int
    metadata: dict[str, str]


def fresh_graph_id() -> str:
    return "g-" + uuid.uuid4().hex[:12]


def new_graph(
    title: str,
    mode: DialogueMode = DialogueMode.FLEXIBLE,
    *,
    graph_id: str | None = None,
) -> NarrativeGraph:
    """Create an empty graph at version 1.

    Args:
        title: Human-readable scenario title; must not be blank.
        mode: Dialogue mode for sessions run against this graph.
        graph_id: Explicit id, otherwise a fresh unique one is assigned.

    Raises:
        EmptyTitleError: If the title is empty or whitespace.
    """
    if not title.strip():
        raise EmptyTitleError("graph title must be non-empty")
    return NarrativeGraph(
        id=graph_id or fresh_graph_id(),
        title=title,
        mode=mode,
        start_node=None,
        nodes={},
        edges=(),
        version=1,
        metadata={},
    )


def outgoing_edges(graph: NarrativeGraph, node_id: NodeId) -> tuple[TransitionEdge, ...]:
    """Edges leaving ``node_id`` in insertion order.

    Raises:
        UnknownIdError: If the node is not in the graph.
    """
    if node_id not in graph.nodes:
        raise UnknownIdError(node_id, f"unknown node: {node_id!r}")
    return tuple(e for e in graph.edges if e.from_node == node_id)
