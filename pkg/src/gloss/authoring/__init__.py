"""Authoring surfaces: JSON persistence, DSL, DOT export, templates,
provider-backed generation."""
from gloss.authoring.dot import render_dot
from gloss.authoring.dsl import DslDiagnostic, parse_dsl, render_dsl
from gloss.authoring.generate import expand_node, generate_graph
from gloss.authoring.jsonio import (
    canonical_json,
    from_json,
    graph_from_dict,
    graph_to_dict,
    to_json,
)
from gloss.authoring.templates import instantiate_template, list_templates

__all__ = [
    "DslDiagnostic",
    "canonical_json",
    "expand_node",
    "from_json",
    "generate_graph",
    "graph_from_dict",
    "graph_to_dict",
    "instantiate_template",
    "list_templates",
    "parse_dsl",
    "render_dot",
    "render_dsl",
    "to_json",
]
