"""Instructor-in-the-loop social skills training on branching dialogue graphs.

The package is organized as:

- ``gloss.graph``: immutable narrative graph snapshots, mutations, validation
- ``gloss.authoring``: JSON and DSL serialization, DOT rendering, templates,
  model-assisted graph generation and node expansion
- ``gloss.llm``: provider abstraction (deterministic mock and remote chat
  API), prompt assembly, structured-output parsing with one repair retry
- ``gloss.session``: practice session engine and transcript serialization
- ``gloss.analysis``: per-session reports, cohort aggregation, path overlays
- ``gloss.service``: FastAPI application and file-backed document store
- ``gloss.cli``: command line front end
"""
from gloss.errors import GlossError

__version__ = "0.1.0"

__all__ = ["GlossError", "__version__"]
