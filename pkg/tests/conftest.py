"""Shared fixtures: deterministic clock and seeded random graph builder."""
from __future__ import annotations

import random
from dataclasses import replace

import pytest

from gloss.graph.model import (
    DialogueMode,
    NarrativeGraph,
    Provenance,
    ResponseIntent,
    SceneNode,
    TransitionEdge,
    new_graph,
)
from gloss.graph.mutations import AddEdge, AddNode, SetStart, apply_mutation

_WORDS = (
    "sorry", "refund", "wait", "order", "help", "listen", "calm", "angry",
    "please", "thanks", "ticket", "manager", "today", "week", "again",
    "café", "naïve", "日本語", "Über", "\U0001f642", "Øresund",
)
_SPICE = ('say "no"', "back\\slash", "tab\tstop", "line\nbreak", "ret\rurn", "  padded  ")
_LABEL_STEMS = (
    "patient", "rude", "ignore", "deflect", "commit", "Apologize", "push-back",
    "warm.tone", "ask:why", "KIND", "écoute", "hold on",
)


def random_text(rng: random.Random, *, spice: float = 0.25, max_words: int = 6) -> str:
    words = [rng.choice(_WORDS) for _ in range(rng.randint(1, max_words))]
    if rng.random() < spice:
        words.insert(rng.randrange(len(words) + 1), rng.choice(_SPICE))
    return " ".join(words)


def random_label(rng: random.Random, used_casefolds: set[str]) -> str:
    while True:
        label = rng.choice(_LABEL_STEMS)
        if rng.random() < 0.5:
            label = f"{label} {rng.randint(0, 99)}"
        if label.casefold() not in used_casefolds:
            used_casefolds.add(label.casefold())
            return label


def random_graph(rng: random.Random, max_nodes: int = 30) -> NarrativeGraph:
    """Build an error-free graph through the mutation API.

    Warnings (unreachable nodes, terminal nodes with outgoing edges,
    dead ends) occur naturally; error diagnostics never do.
    """
    mode = rng.choice((DialogueMode.STRICT, DialogueMode.FLEXIBLE))
    graph = new_graph(random_text(rng, max_words=4), mode)
    node_count = rng.randint(1, max_nodes)
    node_ids = []
    for i in range(node_count):
        node_id = f"n{i}" if rng.random() < 0.85 else f"room {i} ü"
        node_ids.append(node_id)
        node = SceneNode(
            id=node_id,
            avatar_utterance=random_text(rng),
            description=random_text(rng) if rng.random() < 0.4 else "",
            terminal=rng.random() < 0.2,
            provenance=rng.choice(tuple(Provenance)),
        )
        graph = apply_mutation(graph, AddNode(node))
    labels_by_node: dict[str, set[str]] = {nid: set() for nid in node_ids}
    edge_count = rng.randint(0, min(3 * node_count, 45))
    for j in range(edge_count):
        from_node = rng.choice(node_ids)
        to_node = rng.choice(node_ids)
        edge_id = f"e{j}" if rng.random() < 0.9 else f"edge:{j}.alt"
        examples = tuple(
            random_text(rng) for _ in range(rng.randint(0, 3))
        )
        edge = TransitionEdge(
            id=edge_id,
            from_node=from_node,
            to_node=to_node,
            intent=ResponseIntent(
                label=random_label(rng, labels_by_node[from_node]),
                description=random_text(rng) if rng.random() < 0.4 else "",
                examples=examples,
            ),
            provenance=rng.choice(tuple(Provenance)),
        )
        graph = apply_mutation(graph, AddEdge(edge))
    if rng.random() < 0.3:
        graph = apply_mutation(graph, SetStart(rng.choice(node_ids)))
    if rng.random() < 0.3:
        meta = {random_text(rng, max_words=2): random_text(rng) for _ in range(rng.randint(1, 3))}
        graph = replace(graph, metadata=meta)
    return graph


class FakeClock:
    """Monotonic deterministic timestamps in the transcript format."""

    def __init__(self) -> None:
        self._tick = 0

    def __call__(self) -> str:
        self._tick += 1
        minutes, seconds = divmod(self._tick, 60)
        return f"2026-01-01T00:{minutes:02d}:{seconds:02d}.000Z"


@pytest.fixture
def fake_clock() -> FakeClock:
    return FakeClock()


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
