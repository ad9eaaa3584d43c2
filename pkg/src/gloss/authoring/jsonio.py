"""Canonical JSON persistence for narrative graphs.

Document layout (stable contract, shared by the file store, the HTTP API,
and generation prompts):

    {
      "id": str, "title": str, "mode": "strict"|"flexible",
      "start_node": str|null, "version": int >= 1,
      "metadata": {str: str},
      "nodes": [
        {"id": str, "avatar_utterance": str, "description": str,
         "terminal": bool, "provenance": "authored"|"generated"|"template"}
      ],
      "edges": [
        {"id": str, "from": str, "to": str,
         "intent": {"label": str, "description": str, "examples": [str]},
         "provenance": str}
      ]
    }

Canonical form: keys sorted, two-space indent, UTF-8 with no ASCII
escaping, LF line endings, trailing newline, nodes ordered by id, edges in
insertion order. Serializing the same snapshot always yields the same
bytes.
"""
from __future__ import annotations

import json
from typing import Any

from gloss.errors import SchemaViolationError
from gloss.graph.model import (
    DialogueMode,
    NarrativeGraph,
    Provenance,
    ResponseIntent,
    SceneNode,
    TransitionEdge,
    fresh_graph_id,
)

_MODES = {m.value for m in DialogueMode}
_PROVENANCES = {p.value for p in Provenance}


def canonical_json(payload: Any) -> str:
    """Serialize ``payload`` in the package-wide canonical JSON form."""
    return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def graph_to_dict(graph: NarrativeGraph) -> dict[str, Any]:
    return {
        "id": graph.id,
        "title": graph.title,
        "mode": graph.mode.value,
        "start_node": graph.start_node,
        "version": graph.version,
        "metadata": dict(graph.metadata),
        "nodes": [
            {
                "id": node.id,
                "avatar_utterance": node.avatar_utterance,
                "description": node.description,
                "terminal": node.terminal,
                "provenance": node.provenance.value,
            }
            for node in sorted(graph.nodes.values(), key=lambda n: n.id)
        ],
        "edges": [
            {
                "id": edge.id,
                "from": edge.from_node,
                "to": edge.to_node,
                "intent": {
                    "label": edge.intent.label,
                    "description": edge.intent.description,
                    "examples": list(edge.intent.examples),
                },
                "provenance": edge.provenance.value,
            }
            for edge in graph.edges
        ],
    }


def to_json(graph: NarrativeGraph) -> str:
    """Render a graph in canonical JSON text."""
    return canonical_json(graph_to_dict(graph))


def _fail(path: str, message: str) -> SchemaViolationError:
    return SchemaViolationError(path, message)


def _expect(value: Any, kind: type, path: str, label: str) -> Any:
    # bool is an int subclass; reject it explicitly for int fields.
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise _fail(path, f"expected {label}")
    return value


def _expect_str(value: Any, path: str, *, non_empty: bool = False) -> str:
    text = _expect(value, str, path, "a string")
    if non_empty and not text:
        raise _fail(path, "must be non-empty")
    return text


def _get(obj: dict, key: str, path: str, *, lenient: bool, default: Any = None) -> Any:
    if key in obj:
        return obj[key]
    if lenient:
        return default
    raise _fail(f"{path}/{key}", "missing required field")


def _decode_provenance(value: Any, path: str, *, lenient: bool) -> Provenance:
    if value is None and lenient:
        return Provenance.AUTHORED
    text = _expect_str(value, path)
    if text not in _PROVENANCES:
        raise _fail(path, f"must be one of {sorted(_PROVENANCES)}")
    return Provenance(text)


def _decode_node(obj: Any, path: str, *, lenient: bool) -> SceneNode:
    node = _expect(obj, dict, path, "an object")
    node_id = _expect_str(_get(node, "id", path, lenient=False), f"{path}/id", non_empty=True)
    utterance = _expect_str(
        _get(node, "avatar_utterance", path, lenient=False),
        f"{path}/avatar_utterance",
        non_empty=True,
    )
    description = _expect_str(
        _get(node, "description", path, lenient=lenient, default=""), f"{path}/description"
    )
    terminal = _expect(
        _get(node, "terminal", path, lenient=lenient, default=False),
        bool,
        f"{path}/terminal",
        "a boolean",
    )
    provenance = _decode_provenance(
        _get(node, "provenance", path, lenient=lenient), f"{path}/provenance", lenient=lenient
    )
    if not lenient:
        extra = set(node) - {"id", "avatar_utterance", "description", "terminal", "provenance"}
        if extra:
            raise _fail(f"{path}/{sorted(extra)[0]}", "unknown field")
    return SceneNode(
        id=node_id,
        avatar_utterance=utterance,
        description=description,
        terminal=terminal,
        provenance=provenance,
    )


def _decode_intent(obj: Any, path: str, *, lenient: bool) -> ResponseIntent:
    intent = _expect(obj, dict, path, "an object")
    label = _expect_str(_get(intent, "label", path, lenient=False), f"{path}/label", non_empty=True)
    if "\n" in label or "\r" in label:
        raise _fail(f"{path}/label", "must not contain newlines")
    description = _expect_str(
        _get(intent, "description", path, lenient=lenient, default=""), f"{path}/description"
    )
    raw_examples = _get(intent, "examples", path, lenient=lenient, default=[])
    examples_list = _expect(raw_examples, list, f"{path}/examples", "an array")
    examples = tuple(
        _expect_str(item, f"{path}/examples/{i}") for i, item in enumerate(examples_list)
    )
    if not lenient:
        extra = set(intent) - {"label", "description", "examples"}
        if extra:
            raise _fail(f"{path}/{sorted(extra)[0]}", "unknown field")
    return ResponseIntent(label=label, description=description, examples=examples)


def _decode_edge(obj: Any, path: str, *, lenient: bool) -> TransitionEdge:
    edge = _expect(obj, dict, path, "an object")
    edge_id = _expect_str(_get(edge, "id", path, lenient=False), f"{path}/id", non_empty=True)
    from_node = _expect_str(_get(edge, "from", path, lenient=False), f"{path}/from", non_empty=True)
    to_node = _expect_str(_get(edge, "to", path, lenient=False), f"{path}/to", non_empty=True)
    intent = _decode_intent(_get(edge, "intent", path, lenient=False), f"{path}/intent", lenient=lenient)
    provenance = _decode_provenance(
        _get(edge, "provenance", path, lenient=lenient), f"{path}/provenance", lenient=lenient
    )
    if not lenient:
        extra = set(edge) - {"id", "from", "to", "intent", "provenance"}
        if extra:
            raise _fail(f"{path}/{sorted(extra)[0]}", "unknown field")
    return TransitionEdge(
        id=edge_id, from_node=from_node, to_node=to_node, intent=intent, provenance=provenance
    )


def graph_from_dict(payload: Any, *, lenient: bool = False) -> NarrativeGraph:
    """Decode a graph document.

    Strict mode (the default) is used for persisted documents: every field
    of the documented schema must be present and nothing else. Lenient mode
    is used for provider-generated payloads: id, version, metadata,
    provenance, descriptions, terminal flags, and mode may be omitted, and
    unknown fields are ignored.

    Raises:
        SchemaViolationError: With a JSON-pointer style path to the fault.
    """
    root = _expect(payload, dict, "", "an object")

    graph_id = _get(root, "id", "", lenient=lenient, default=None)
    graph_id = fresh_graph_id() if graph_id is None else _expect_str(graph_id, "/id", non_empty=True)

    title = _expect_str(_get(root, "title", "", lenient=False), "/title", non_empty=True)

    mode_raw = _get(root, "mode", "", lenient=lenient, default=DialogueMode.FLEXIBLE.value)
    mode_text = _expect_str(mode_raw, "/mode")
    if mode_text not in _MODES:
        raise _fail("/mode", f"must be one of {sorted(_MODES)}")

    start_raw = _get(root, "start_node", "", lenient=False)
    start_node = None if start_raw is None else _expect_str(start_raw, "/start_node", non_empty=True)

    version_raw = _get(root, "version", "", lenient=lenient, default=1)
    version = _expect(version_raw, int, "/version", "an integer")
    if version < 1:
        raise _fail("/version", "must be >= 1")

    metadata_raw = _get(root, "metadata", "", lenient=lenient, default={})
    metadata_obj = _expect(metadata_raw, dict, "/metadata", "an object")
    metadata: dict[str, str] = {}
    for key, value in metadata_obj.items():
        metadata[str(key)] = _expect_str(value, f"/metadata/{key}")

    nodes_raw = _expect(_get(root, "nodes", "", lenient=False), list, "/nodes", "an array")
    nodes: dict[str, SceneNode] = {}
    for i, item in enumerate(nodes_raw):
        node = _decode_node(item, f"/nodes/{i}", lenient=lenient)
        if node.id in nodes:
            raise _fail(f"/nodes/{i}/id", f"duplicate node id {node.id!r}")
        nodes[node.id] = node

    edges_raw = _expect(_get(root, "edges", "", lenient=False), list, "/edges", "an array")
    edges = tuple(
        _decode_edge(item, f"/edges/{i}", lenient=lenient) for i, item in enumerate(edges_raw)
    )

    if not lenient:
        extra = set(root) - {
            "id",
            "title",
            "mode",
            "start_node",
            "version",
            "metadata",
            "nodes",
            "edges",
        }
        if extra:
            raise _fail(f"/{sorted(extra)[0]}", "unknown field")

    return NarrativeGraph(
        id=graph_id,
        title=title,
        mode=DialogueMode(mode_text),
        start_node=start_node,
        nodes=nodes,
        edges=edges,
        version=version,
        metadata=metadata,
    )


def from_json(text: str) -> NarrativeGraph:
    """Parse canonical (or any schema-conforming) graph JSON.

    Raises:
        SchemaViolationError: When the text is not JSON or violates the schema.
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolationError("", f"not valid JSON: {exc}") from exc
    return graph_from_dict(payload)
