"""HTTP service: FastAPI application, request schemas, document store."""
from gloss.service.app import ApiException, ServiceSettings, create_app
from gloss.service.store import DocumentKind, DocumentStore, StoredDocument

__all__ = [
    "ApiException",
    "ServiceSettings",
    "create_app",
    "DocumentKind",
    "DocumentStore",
    "StoredDocument",
]
