"""Plain-text authoring format for narrative graphs.

One statement per line; lines whose first non-blank character is ``#`` are
comments; blank lines are ignored.

    graph "Title" [id=ID] [mode=strict|flexible] [start=NODE]
    meta KEY="value"
    node ID avatar="..." [desc="..."] [terminal=true|false] [prov=authored|generated|template]
    edge ID FROM -> TO intent=LABEL [desc="..."] [examples=["...", ...]] [prov=...]

Bare tokens cover ids and simple labels; anything else is a quoted string
with ``\\"``, ``\\\\``, ``\\n``, ``\\t``, ``\\r`` escapes. The header may
omit ``start``, in which case the first declared node is the start. A graph
parsed from text is always at version 1.

Parsing recovers per line: a malformed line yields one error diagnostic
(1-based line and column) and parsing continues with the next line. The
graph is only produced when there are no error diagnostics.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from gloss.graph.model import (
    DialogueMode,
    NarrativeGraph,
    Provenance,
    ResponseIntent,
    SceneNode,
    Severity,
    TransitionEdge,
    fresh_graph_id,
)
from gloss.graph.validation import error_diagnostics


@dataclass(frozen=True)
class DslDiagnostic:
    """A parse finding anchored to a 1-based line and column."""

    severity: Severity
    message: str
    line: int
    column: int


class _LineError(Exception):
    def __init__(self, column: int, message: str) -> None:
        super().__init__(message)
        self.column = column
        self.message = message


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<unterminated>"(?:[^"\\]|\\.)*$)
  | (?P<lbrack>\[)
  | (?P<rbrack>\])
  | (?P<comma>,)
  | (?P<eq>=)
  | (?P<word>[A-Za-z0-9_.:\-]+)
  | (?P<bad>.)
    """,
    re.VERBOSE,
)

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}
_BARE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.:\-]*$")


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int


def _unescape(raw: str, column: int) -> str:
    body = raw[1:-1]
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            code = body[i + 1]
            if code not in _ESCAPES:
                raise _LineError(column + 1 + i, f"unknown escape \\{code}")
            out.append(_ESCAPES[code])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _tokenize(line: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(line):
        match = _TOKEN.match(line, pos)
        assert match is not None
        kind = match.lastgroup or "bad"
        text = match.group()
        column = pos + 1
        pos = match.end()
        if kind == "ws":
            continue
        if kind == "unterminated":
            raise _LineError(column, "unterminated string")
        if kind == "bad":
            raise _LineError(column, f"unexpected character {text!r}")
        if kind == "string":
            tokens.append(_Token("string", _unescape(text, column), column))
        else:
            tokens.append(_Token(kind, text, column))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[_Token], line_length: int) -> None:
        self._tokens = tokens
        self._index = 0
        self._end_column = line_length + 1

    def done(self) -> bool:
        return self._index >= len(self._tokens)

    def peek(self) -> _Token | None:
        return None if self.done() else self._tokens[self._index]

    def take(self, *kinds: str, what: str) -> _Token:
        token = self.peek()
        if token is None:
            raise _LineError(self._end_column, f"expected {what}")
        if kinds and token.kind not in kinds:
            raise _LineError(token.column, f"expected {what}, found {token.text!r}")
        self._index += 1
        return token

    def take_value(self, what: str) -> _Token:
        return self.take("word", "string", what=what)


def _parse_attrs(cursor: _Cursor, allowed: dict[str, str]) -> dict[str, tuple[object, int]]:
    """Parse ``key=value`` pairs until end of line.

    ``allowed`` maps the attribute name to its value shape: "text",
    "bool", or "list". Returns value plus the column of the value token.
    """
    attrs: dict[str, tuple[object, int]] = {}
    while not cursor.done():
        key_token = cursor.take("word", what="attribute name")
        if key_token.text not in allowed:
            raise _LineError(key_token.column, f"unknown attribute {key_token.text!r}")
        if key_token.text in attrs:
            raise _LineError(key_token.column, f"duplicate attribute {key_token.text!r}")
        cursor.take("eq", what="'='")
        shape = allowed[key_token.text]
        if shape == "bool":
            token = cursor.take("word", what="true or false")
            if token.text not in ("true", "false"):
                raise _LineError(token.column, "expected true or false")
            attrs[key_token.text] = (token.text == "true", token.column)
        elif shape == "list":
            open_token = cursor.take("lbrack", what="'['")
            items: list[str] = []
            if cursor.peek() is not None and cursor.peek().kind == "rbrack":
                cursor.take("rbrack", what="']'")
            else:
                while True:
                    items.append(cursor.take_value("string").text)
                    closer = cursor.take("comma", "rbrack", what="',' or ']'")
                    if closer.kind == "rbrack":
                        break
            attrs[key_token.text] = (items, open_token.column)
        else:
            token = cursor.take_value("a value")
            attrs[key_token.text] = (token.text, token.column)
    return attrs


@dataclass
class _PendingEdge:
    edge_id: str
    from_node: str
    to_node: str
    intent: ResponseIntent
    provenance: Provenance
    line: int
    from_column: int
    to_column: int
    intent_column: int


def _parse_provenance(raw: tuple[object, int] | None) -> Provenance:
    if raw is None:
        return Provenance.AUTHORED
    value, column = raw
    try:
        return Provenance(str(value))
    except ValueError:
        raise _LineError(column, f"unknown provenance {value!r}") from None


def parse_dsl(text: str) -> tuple[NarrativeGraph | None, tuple[DslDiagnostic, ...]]:
    """Parse graph text.

    Returns ``(graph, diagnostics)``; the graph is None whenever any
    diagnostic has error severity.
    """
    diagnostics: list[DslDiagnostic] = []

    def report(line: int, column: int, message: str) -> None:
        diagnostics.append(
            DslDiagnostic(severity=Severity.ERROR, message=message, line=line, column=column)
        )

    header: dict[str, tuple[object, int]] | None = None
    header_title = ""
    header_line = 1
    metadata: dict[str, str] = {}
    nodes: dict[str, SceneNode] = {}
    node_lines: dict[str, int] = {}
    edges: list[_PendingEdge] = []
    edge_ids: dict[str, int] = {}

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        stripped = raw_line.split("#", 1)[0] if raw_line.lstrip().startswith("#") else raw_line
        if not stripped.strip():
            continue
        try:
            tokens = _tokenize(stripped)
        except _LineError as exc:
            report(line_no, exc.column, exc.message)
            continue
        if not tokens:
            continue
        cursor = _Cursor(tokens, len(stripped))
        try:
            keyword = cursor.take("word", what="a statement keyword")
            if keyword.text == "graph":
                if header is not None:
                    raise _LineError(keyword.column, "duplicate graph header")
                title_token = cursor.take_value("the graph title")
                header = _parse_attrs(cursor, {"id": "text", "mode": "text", "start": "text"})
                header_title = title_token.text
                header_line = line_no
                if not header_title.strip():
                    raise _LineError(title_token.column, "graph title must be non-empty")
                if "mode" in header:
                    mode_value, mode_column = header["mode"]
                    if str(mode_value) not in (m.value for m in DialogueMode):
                        raise _LineError(mode_column, f"unknown mode {mode_value!r}")
            elif keyword.text == "meta":
                key_token = cursor.take_value("a metadata key")
                cursor.take("eq", what="'='")
                value_token = cursor.take_value("a metadata value")
                if cursor.peek() is not None:
                    raise _LineError(cursor.peek().column, "unexpected trailing tokens")
                metadata[key_token.text] = value_token.text
            elif keyword.text == "node":
                id_token = cursor.take_value("a node id")
                if not id_token.text.strip():
                    raise _LineError(id_token.column, "node id must be non-blank")
                attrs = _parse_attrs(
                    cursor, {"avatar": "text", "desc": "text", "terminal": "bool", "prov": "text"}
                )
                if "avatar" not in attrs:
                    raise _LineError(keyword.column, "node is missing the avatar attribute")
                avatar = str(attrs["avatar"][0])
                if not avatar:
                    raise _LineError(attrs["avatar"][1], "avatar must be non-empty")
                if id_token.text in nodes:
                    raise _LineError(
                        id_token.column,
                        f"duplicate node id {id_token.text!r} (first declared on line {node_lines[id_token.text]})",
                    )
                nodes[id_token.text] = SceneNode(
                    id=id_token.text,
                    avatar_utterance=avatar,
                    description=str(attrs["desc"][0]) if "desc" in attrs else "",
                    terminal=bool(attrs["terminal"][0]) if "terminal" in attrs else False,
                    provenance=_parse_provenance(attrs.get("prov")),
                )
                node_lines[id_token.text] = line_no
            elif keyword.text == "edge":
                id_token = cursor.take_value("an edge id")
                from_token = cursor.take_value("the source node id")
                cursor.take("arrow", what="'->'")
                to_token = cursor.take_value("the target node id")
                for token in (id_token, from_token, to_token):
                    if not token.text.strip():
                        raise _LineError(token.column, "ids must be non-blank")
                attrs = _parse_attrs(
                    cursor,
                    {"intent": "text", "desc": "text", "examples": "list", "prov": "text"},
                )
                if "intent" not in attrs:
                    raise _LineError(keyword.column, "edge is missing the intent attribute")
                label = str(attrs["intent"][0])
                if not label:
                    raise _LineError(attrs["intent"][1], "intent label must be non-empty")
                if "\n" in label or "\r" in label:
                    raise _LineError(attrs["intent"][1], "intent label must not contain newlines")
                if id_token.text in edge_ids:
                    raise _LineError(
                        id_token.column,
                        f"duplicate edge id {id_token.text!r} (first declared on line {edge_ids[id_token.text]})",
                    )
                edge_ids[id_token.text] = line_no
                examples = attrs["examples"][0] if "examples" in attrs else []
                edges.append(
                    _PendingEdge(
                        edge_id=id_token.text,
                        from_node=from_token.text,
                        to_node=to_token.text,
                        intent=ResponseIntent(
                            label=label,
                            description=str(attrs["desc"][0]) if "desc" in attrs else "",
                            examples=tuple(str(x) for x in examples),
                        ),
                        provenance=_parse_provenance(attrs.get("prov")),
                        line=line_no,
                        from_column=from_token.column,
                        to_column=to_token.column,
                        intent_column=attrs["intent"][1],
                    )
                )
            else:
                raise _LineError(keyword.column, f"unknown statement {keyword.text!r}")
        except _LineError as exc:
            report(line_no, exc.column, exc.message)

    if header is None:
        report(1, 1, "missing graph header")
    seen_labels: set[tuple[str, str]] = set()
    for pending in edges:
        if pending.from_node not in nodes:
            report(pending.line, pending.from_column, f"edge references undeclared node {pending.from_node!r}")
        if pending.to_node not in nodes:
            report(pending.line, pending.to_column, f"edge references undeclared node {pending.to_node!r}")
        label_key = (pending.from_node, pending.intent.label.casefold())
        if label_key in seen_labels:
            report(
                pending.line,
                pending.intent_column,
                f"node {pending.from_node!r} already has an intent labelled {pending.intent.label!r}",
            )
        seen_labels.add(label_key)

    start: str | None = None
    if header is not None:
        if "start" in header:
            start_value, start_column = header["start"]
            start = str(start_value)
            if start not in nodes:
                report(header_line, start_column, f"start references undeclared node {start!r}")
        elif nodes:
            start = next(iter(nodes))

    if any(d.severity == Severity.ERROR for d in diagnostics):
        return None, tuple(diagnostics)

    assert header is not None
    graph_id = str(header["id"][0]) if "id" in header else fresh_graph_id()
    mode = DialogueMode(str(header["mode"][0])) if "mode" in header else DialogueMode.FLEXIBLE
    graph = NarrativeGraph(
        id=graph_id,
        title=header_title,
        mode=mode,
        start_node=start,
        nodes=nodes,
        edges=tuple(
            TransitionEdge(
                id=p.edge_id,
                from_node=p.from_node,
                to_node=p.to_node,
                intent=p.intent,
                provenance=p.provenance,
            )
            for p in edges
        ),
        version=1,
        metadata=metadata,
    )
    return graph, tuple(diagnostics)


def _quote(text: str) -> str:
    escaped = (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\t", "\\t")
        .replace("\r", "\\r")
    )
    return f'"{escaped}"'


def _value(text: str) -> str:
    return text if _BARE.match(text) else _quote(text)


def render_dsl(graph: NarrativeGraph) -> str:
    """Render a graph as DSL text.

    The output is canonical: header first, metadata sorted by key, nodes
    sorted by id, edges in insertion order. Parsing the output reproduces
    the graph except for its version, and rendering that parse yields the
    same text again.

    Raises:
        ValueError: If the graph has error-severity diagnostics.
    """
    errors = error_diagnostics(graph)
    if errors:
        raise ValueError(
            "cannot render a graph with error diagnostics: "
            + ", ".join(f"{d.code} {d.subject}" for d in errors)
        )

    header = f"graph {_quote(graph.title)} id={_value(graph.id)} mode={graph.mode.value}"
    if graph.start_node is not None:
        header += f" start={_value(graph.start_node)}"
    lines = [header]
    for key in sorted(graph.metadata):
        lines.append(f"meta {_value(key)}={_quote(graph.metadata[key])}")
    for node in sorted(graph.nodes.values(), key=lambda n: n.id):
        parts = [f"node {_value(node.id)} avatar={_quote(node.avatar_utterance)}"]
        if node.description:
            parts.append(f"desc={_quote(node.description)}")
        if node.terminal:
            parts.append("terminal=true")
        if node.provenance is not Provenance.AUTHORED:
            parts.append(f"prov={node.provenance.value}")
        lines.append(" ".join(parts))
    for edge in graph.edges:
        parts = [
            f"edge {_value(edge.id)} {_value(edge.from_node)} -> {_value(edge.to_node)}",
            f"intent={_value(edge.intent.label)}",
        ]
        if edge.intent.description:
            parts.append(f"desc={_quote(edge.intent.description)}")
        if edge.intent.examples:
            rendered = ", ".join(_quote(x) for x in edge.intent.examples)
            parts.append(f"examples=[{rendered}]")
        if edge.provenance is not Provenance.AUTHORED:
            parts.append(f"prov={edge.provenance.value}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
