"""Pydantic models for the HTTP boundary."""
from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class GraphCreateRequest(BaseModel):
    """Create an empty graph from ``title``/``mode``, or import a full
    document via ``graph``."""

    title: Optional[str] = None
    mode: Literal["strict", "flexible"] = "flexible"
    graph: Optional[dict[str, Any]] = None


class GenerateRequest(BaseModel):
    prompt: str


class ExpandRequest(BaseModel):
    node_id: str
    instruction: str = ""


class SessionCreateRequest(BaseModel):
    graph_id: str
    threshold: Optional[float] = None


class TurnRequest(BaseModel):
    utterance: str


class GraphSummary(BaseModel):
    id: str
    title: str
    mode: str
    version: int
    start_node: Optional[str]
    node_count: int
    edge_count: int


class GraphListResponse(BaseModel):
    graphs: list[GraphSummary]


class DiagnosticModel(BaseModel):
    code: str
    severity: str
    message: str
    subject: str


class ValidateResponse(BaseModel):
    diagnostics: list[DiagnosticModel]


class TemplateListResponse(BaseModel):
    templates: list[str]


class ApiErrorBody(BaseModel):
    """Error payload: HTTP status, stable machine code, human message."""

    status: int
    code: str
    message: str
    detail: Optional[Any] = Field(default=None)
