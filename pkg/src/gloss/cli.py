"""Command line front end.

The CLI is a thin client over the core package: it parses files, renders
formats, and drives a local practice session. ``serve`` hosts the HTTP
service. Graph files may be JSON or the text DSL; the loader picks by
extension and falls back to sniffing the first non-blank character.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from gloss.analysis.reports import path_of, session_report
from gloss.authoring.dot import render_dot
from gloss.authoring.dsl import parse_dsl, render_dsl
from gloss.authoring.jsonio import canonical_json, from_json, to_json
from gloss.errors import GlossError
from gloss.graph.model import NarrativeGraph
from gloss.graph.validation import validate
from gloss.llm.config import ProviderConfig, ProviderKind
from gloss.llm.providers import provider_from_config
from gloss.session.engine import (
    DEFAULT_MATCH_THRESHOLD,
    GeneratedBranch,
    Matched,
    Rejected,
    SessionStatus,
    start_session,
    submit_turn,
)
from gloss.session.serialize import session_from_dict, session_to_dict


def _fail(message: str) -> "click.exceptions.ClickException":
    err = click.ClickException(message)
    err.exit_code = 1
    return err


def load_graph_file(path: Path) -> NarrativeGraph:
    """Read a graph from JSON or DSL; raises ClickException on any problem."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise _fail(f"cannot read {path}: {exc}") from exc
    suffix = path.suffix.lower()
    looks_json = suffix == ".json" or (
        suffix not in (".dsl", ".gloss") and text.lstrip()[:1] == "{"
    )
    if looks_json:
        try:
            return from_json(text)
        except GlossError as exc:
            raise _fail(f"{path}: {exc}") from exc
    graph, diagnostics = parse_dsl(text)
    if graph is None:
        lines = [f"{path}:{d.line}:{d.column}: {d.severity}: {d.message}" for d in diagnostics]
        raise _fail("\n".join(lines) or f"{path}: empty input")
    return graph


@click.group()
def main() -> None:
    """Author, validate, simulate, and analyze branching dialogue scenarios."""


@main.command(name="validate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def validate_cmd(file: Path) -> None:
    """Check a graph file; prints diagnostics and exits 0 only when error-free."""
    graph = load_graph_file(file)
    diagnostics = validate(graph)
    for diag in diagnostics:
        click.echo(f"{diag.code} {diag.severity.value} {diag.subject}: {diag.message}", err=True)
    if any(diag.severity.value == "error" for diag in diagnostics):
        sys.exit(1)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["dot", "dsl", "json"]),
    default="dot",
    show_default=True,
)
def render(file: Path, fmt: str) -> None:
    """Print a graph as Graphviz DOT, canonical DSL, or canonical JSON."""
    graph = load_graph_file(file)
    if fmt == "dot":
        click.echo(render_dot(graph), nl=False)
    elif fmt == "dsl":
        try:
            click.echo(render_dsl(graph), nl=False)
        except ValueError as exc:
            raise _fail(str(exc)) from exc
    else:
        click.echo(to_json(graph), nl=False)


def _build_provider(kind: str):
    config = ProviderConfig.from_env()
    if kind == "mock":
        config = ProviderConfig(kind=ProviderKind.MOCK)
    elif kind == "remote" and config.kind is not ProviderKind.REMOTE_CHAT_COMPLETION:
        raise _fail(
            "remote provider needs GLOSS_PROVIDER=remote with GLOSS_BASE_URL and GLOSS_MODEL set"
        )
    return provider_from_config(config)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--provider", "provider_kind", type=click.Choice(["mock", "remote"]), default="mock", show_default=True)
@click.option("--threshold", type=float, default=DEFAULT_MATCH_THRESHOLD, show_default=True)
@click.option(
    "--session-out",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the finished session transcript to this JSON file.",
)
@click.option(
    "--graph-out",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the final graph (including any generated branches) to this JSON file.",
)
def run(
    file: Path,
    provider_kind: str,
    threshold: float,
    session_out: Path | None,
    graph_out: Path | None,
) -> None:
    """Practice a scenario interactively; reads student turns from stdin."""
    graph = load_graph_file(file)
    provider = _build_provider(provider_kind)
    try:
        session = start_session(graph, threshold)
    except GlossError as exc:
        raise _fail(str(exc)) from exc

    click.echo(f"[scenario] {graph.title}")
    click.echo(f"[avatar] {graph.nodes[graph.start_node].avatar_utterance}")
    while session.status is SessionStatus.ACTIVE:
        try:
            utterance = click.prompt("you", prompt_suffix="> ")
        except (click.exceptions.Abort, EOFError):
            click.echo("")
            break
        if not utterance.strip():
            continue
        if utterance.strip() == "/quit":
            break
        try:
            outcome = submit_turn(session, graph, provider, utterance)
        except GlossError as exc:
            click.echo(f"[error] {exc}", err=True)
            continue
        session, graph, turn = outcome.session, outcome.graph, outcome.turn
        decision = turn.decision
        if isinstance(decision, Matched):
            click.echo(f"[matched {decision.edge_id} at {decision.confidence:.3f}]")
        elif isinstance(decision, GeneratedBranch):
            click.echo(f"[new branch {decision.new_edge_id} -> {decision.new_node_id}]")
        elif isinstance(decision, Rejected):
            click.echo(f"[no match; closest {decision.best_confidence:.3f}; try: {decision.hint}]")
        if turn.avatar_reply:
            click.echo(f"[avatar] {turn.avatar_reply}")
        click.echo(f"[coach] {turn.feedback}")
    if session.status is SessionStatus.COMPLETED:
        click.echo("[session complete]")
    if session_out is not None:
        session_out.write_text(
            canonical_json(session_to_dict(session)), encoding="utf-8"
        )
        click.echo(f"[saved] {session_out}")
    if graph_out is not None:
        graph_out.write_text(to_json(graph), encoding="utf-8")
        click.echo(f"[saved] {graph_out}")


@main.command()
@click.argument("session_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def report(session_file: Path, graph_file: Path) -> None:
    """Print the per-session report as JSON; verifies the transcript replays."""
    graph = load_graph_file(graph_file)
    try:
        session = session_from_dict(json.loads(session_file.read_text(encoding="utf-8")))
    except (OSError, ValueError, GlossError) as exc:
        raise _fail(f"{session_file}: {exc}") from exc
    try:
        path_of(session, graph)
    except GlossError as exc:
        raise _fail(f"transcript does not replay on this graph: {exc}") from exc
    click.echo(canonical_json(session_report(session).to_dict()), nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Host the HTTP service."""
    import uvicorn

    from gloss.service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
