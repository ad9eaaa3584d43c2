"""Exception types shared across the package.

Every domain error raised by this package derives from GlossError so
callers (the CLI and the HTTP service) can map failures to exit codes
and API error payloads in one place.
"""
from __future__ import annotations


class GlossError(Exception):
    """Base class for all domain errors."""


# ---------------------------------------------------------------------------
# Graph construction and mutation


class EmptyTitleError(GlossError):
    """A graph title was empty or whitespace."""


class UnknownIdError(GlossError):
    """An operation referenced a node, edge, or element id that does not exist."""

    def __init__(self, element_id: str, message: str | None = None) -> None:
        super().__init__(message or f"unknown id: {element_id!r}")
        self.element_id = element_id


class DuplicateIdError(GlossError):
    """An element id collided with one already present in the graph."""

    def __init__(self, element_id: str) -> None:
        super().__init__(f"duplicate id: {element_id!r}")
        self.element_id = element_id


class DuplicateIntentLabelError(GlossError):
    """Two outgoing edges of one node would share an intent label."""

    def __init__(self, node_id: str, label: str) -> None:
        super().__init__(
            f"node {node_id!r} already has an outgoing intent labelled {label!r}"
        )
        self.node_id = node_id
        self.label = label


# ---------------------------------------------------------------------------
# Serialization and authoring


class SchemaViolationError(GlossError):
    """A document failed schema checks; ``path`` is a JSON-pointer style locator."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path or '/'}: {message}")
        self.path = path
        self.reason = message


class UnknownTemplateError(GlossError):
    """Requested scenario template is not in the registry."""

    def __init__(self, template_id: str) -> None:
        super().__init__(f"unknown template: {template_id!r}")
        self.template_id = template_id


class MalformedGenerationError(GlossError):
    """Provider output for a structured task stayed unusable after a repair retry."""


class MalformedClassificationError(GlossError):
    """Provider output for a classification task stayed unusable after a repair retry."""


class EmptyCandidatesError(GlossError):
    """classify_intent was called with no candidate edges."""


# ---------------------------------------------------------------------------
# Providers


class ProviderError(GlossError):
    """Base class for provider transport failures."""


class ProviderTimeoutError(ProviderError):
    """The provider did not answer within the configured timeout."""


class ProviderHttpError(ProviderError):
    """The provider answered with a non-success HTTP status."""

    def __init__(self, status: int, message: str | None = None) -> None:
        super().__init__(message or f"provider returned HTTP {status}")
        self.status = status


class ProviderUnavailableError(ProviderError):
    """The provider could not be reached or sent an unusable response envelope."""


# ---------------------------------------------------------------------------
# Sessions


class InvalidGraphError(GlossError):
    """A session was started on a graph with error-severity diagnostics."""

    def __init__(self, diagnostics: tuple = ()) -> None:
        details = "; ".join(f"{d.code} {d.subject}" for d in diagnostics)
        super().__init__(f"graph fails validation: {details}" if details else "graph fails validation")
        self.diagnostics = diagnostics


class EmptyGraphError(GlossError):
    """A session was started on a graph with no nodes."""


class InvalidThresholdError(GlossError):
    """Match threshold fell outside [0, 1]."""


class SessionCompletedError(GlossError):
    """A turn or end was submitted to a session that is already completed."""


class EmptyUtteranceError(GlossError):
    """A submitted student utterance was empty after trimming."""


class SessionBusyError(GlossError):
    """A turn arrived while another turn for the same session was in flight."""


# ---------------------------------------------------------------------------
# Analysis


class InconsistentTranscriptError(GlossError):
    """A session transcript references elements missing from its graph."""


# ---------------------------------------------------------------------------
# Document store


class NotFoundError(GlossError):
    """Requested stored document does not exist."""

    def __init__(self, kind: str, doc_id: str) -> None:
        super().__init__(f"{kind} {doc_id!r} not found")
        self.kind = kind
        self.doc_id = doc_id


class VersionConflictError(GlossError):
    """Optimistic write lost: the stored version moved past the expected one."""

    def __init__(self, expected: int, actual: int) -> None:
        super().__init__(f"version conflict: expected {expected}, stored {actual}")
        self.expected = expected
        self.actual = actual


class IoFailureError(GlossError):
    """An underlying filesystem operation failed."""
