"""Bundled scenario templates.

A template instantiates to a fresh, fully valid graph (zero diagnostics)
whose elements carry template provenance, ready to edit or to run as-is.
Every call mints a new graph id so instantiations never collide in the
store.
"""
from __future__ import annotations

from typing import Callable

from gloss.errors import UnknownTemplateError
from gloss.graph.model import (
    DialogueMode,
    NarrativeGraph,
    Provenance,
    ResponseIntent,
    SceneNode,
    TransitionEdge,
    fresh_graph_id,
)


def _node(node_id: str, utterance: str, description: str, *, terminal: bool = False) -> SceneNode:
    return SceneNode(
        id=node_id,
        avatar_utterance=utterance,
        description=description,
        terminal=terminal,
        provenance=Provenance.TEMPLATE,
    )


def _edge(edge_id: str, src: str, dst: str, label: str, description: str, examples: tuple[str, ...]) -> TransitionEdge:
    return TransitionEdge(
        id=edge_id,
        from_node=src,
        to_node=dst,
        intent=ResponseIntent(label=label, description=description, examples=examples),
        provenance=Provenance.TEMPLATE,
    )


def _customer_service() -> NarrativeGraph:
    nodes = [
        _node(
            "n0",
            "This is unacceptable! I have been waiting three weeks for my refund and nobody returns my calls!",
            "An angry customer confronts the support desk.",
        ),
        _node(
            "n1",
            "Well... thank you for actually listening. Can you get my refund processed today?",
            "The customer calms down a little.",
        ),
        _node(
            "n2",
            "Excuse me?! I want to speak with your manager immediately!",
            "The customer escalates.",
        ),
        _node(
            "n3",
            "Hello?! Are you even listening to me? This is exactly what happened on the phone!",
            "Being ignored makes everything worse.",
        ),
        _node(
            "n4",
            "Thank you. I appreciate you taking care of this.",
            "Resolved: the customer leaves satisfied.",
            terminal=True,
        ),
        _node(
            "n5",
            "Unbelievable. I will just dispute the charge with my bank.",
            "Unresolved: the customer gives up on support.",
            terminal=True,
        ),
        _node(
            "n6",
            "I am done here. You will be hearing about this in a review.",
            "The customer storms off.",
            terminal=True,
        ),
    ]
    edges = (
        _edge(
            "e1",
            "n0",
            "n1",
            "patient",
            "Stay calm, acknowledge the frustration, and offer to help.",
            (
                "I am sorry for the inconvenience",
                "I understand, let me look into this for you right away",
                "I apologize for the delay, I will sort this out now",
            ),
        ),
        _edge(
            "e2",
            "n0",
            "n2",
            "rude",
            "Snap back at the customer.",
            ("calm down and stop yelling", "that is not my problem"),
        ),
        _edge(
            "e3",
            "n0",
            "n3",
            "ignore",
            "Brush the complaint aside.",
            ("please hold", "next customer please"),
        ),
        _edge(
            "e4",
            "n1",
            "n4",
            "commit",
            "Promise a concrete resolution and own it.",
            (
                "I will process the refund right now and email you a confirmation",
                "you will have it today, and here is my direct line if anything slips",
            ),
        ),
        _edge(
            "e5",
            "n1",
            "n5",
            "deflect",
            "Pass the problem to someone else.",
            ("you will have to call the billing department", "someone else handles refunds"),
        ),
        _edge(
            "e6",
            "n2",
            "n1",
            "apologize",
            "Walk it back and apologize sincerely.",
            ("you are right, I am sorry, let me fix this properly",),
        ),
        _edge(
            "e7",
            "n2",
            "n6",
            "double-down",
            "Keep arguing instead of defusing.",
            ("I said calm down", "stop shouting or I will call security"),
        ),
        _edge(
            "e8",
            "n3",
            "n1",
            "acknowledge",
            "Re-engage and give the customer your full attention.",
            ("sorry, you have my full attention now",),
        ),
    )
    return NarrativeGraph(
        id=fresh_graph_id(),
        title="Angry customer at the support desk",
        mode=DialogueMode.FLEXIBLE,
        start_node="n0",
        nodes={n.id: n for n in nodes},
        edges=edges,
        version=1,
        metadata={"template": "customer-service"},
    )


def _job_interview() -> NarrativeGraph:
    nodes = [
        _node(
            "n0",
            "Tell me about a time you disagreed with a teammate. How did you handle it?",
            "A behavioural interview question.",
        ),
        _node(
            "n1",
            "That is a thoughtful answer. Walking me through the resolution really helps.",
            "The interviewer is satisfied.",
            terminal=True,
        ),
        _node(
            "n2",
            "Hmm. Can you be more specific? I am looking for a concrete situation.",
            "The answer was too vague to evaluate.",
            terminal=True,
        ),
        _node(
            "n3",
            "I see. Blaming the team is a concerning signal for us.",
            "The answer shifted all blame outward.",
            terminal=True,
        ),
    ]
    edges = (
        _edge(
            "e1",
            "n0",
            "n1",
            "specific",
            "Describe a real situation, your action, and the outcome.",
            (
                "we disagreed about a deadline so I set up a one on one to understand their view",
                "I laid out both options with their tradeoffs and we agreed on a trial",
            ),
        ),
        _edge(
            "e2",
            "n0",
            "n2",
            "vague",
            "Generalities without a concrete situation.",
            ("I just try to get along with everyone", "conflict is not really a problem for me"),
        ),
        _edge(
            "e3",
            "n0",
            "n3",
            "defensive",
            "Deflect blame onto the teammate.",
            ("my teammates are usually the problem, not me",),
        ),
    )
    return NarrativeGraph(
        id=fresh_graph_id(),
        title="Behavioural interview: conflict question",
        mode=DialogueMode.STRICT,
        start_node="n0",
        nodes={n.id: n for n in nodes},
        edges=edges,
        version=1,
        metadata={"template": "job-interview"},
    )


_TEMPLATES: dict[str, Callable[[], NarrativeGraph]] = {
    "customer-service": _customer_service,
    "job-interview": _job_interview,
}


def list_templates() -> tuple[str, ...]:
    """Bundled template ids, sorted."""
    return tuple(sorted(_TEMPLATES))


def instantiate_template(template_id: str) -> NarrativeGraph:
    """Build a fresh graph from a bundled template.

    Raises:
        UnknownTemplateError: If the id is not registered.
    """
    try:
        builder = _TEMPLATES[template_id]
    except KeyError:
        raise UnknownTemplateError(template_id) from None
    return builder()
