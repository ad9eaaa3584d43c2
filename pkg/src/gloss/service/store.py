"""File-per-document store with atomic writes and optimistic concurrency.

Documents live under the data directory as ``graphs/<id>.json`` and
``sessions/<id>.json``, holding exactly the canonical JSON body, so the
store stays inspectable and diffable. Every body embeds an integer
``version`` field: the graph's own version for graphs, a service-managed
revision for sessions.

Writes go to a temporary file in the same directory, are flushed and
fsynced, then renamed over the target. A crash between those steps leaves
either the old document or the new one, never a torn file. When
``expected_version`` is given, the write only lands if the currently
stored version still equals it; concurrent writers race under a per-id
lock, so exactly one of them wins.
"""
from __future__ import annotations

import json
import os
import re
import threading
import uuid
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from gloss.errors import IoFailureError, NotFoundError, VersionConflictError


class DocumentKind(str, Enum):
    GRAPH = "graph"
    SESSION = "session"


_SUBDIRS = {DocumentKind.GRAPH: "graphs", DocumentKind.SESSION: "sessions"}
_SAFE_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_-]{0,127}$")


@dataclass(frozen=True)
class StoredDocument:
    kind: DocumentKind
    id: str
    version: int
    body: str


def _body_version(body: str) -> int:
    try:
        payload = json.loads(body)
        version = payload["version"]
    except (ValueError, TypeError, KeyError) as exc:
        raise ValueError("document body must be JSON embedding an integer 'version'") from exc
    if isinstance(version, bool) or not isinstance(version, int) or version < 1:
        raise ValueError("document 'version' must be an integer >= 1")
    return version


class DocumentStore:
    def __init__(self, root: Path | str) -> None:
        self._root = Path(root)
        try:
            for subdir in _SUBDIRS.values():
                (self._root / subdir).mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise IoFailureError(f"cannot create data directory {self._root}: {exc}") from exc
        self._master = threading.Lock()
        self._locks: dict[tuple[DocumentKind, str], threading.Lock] = {}

    def _path(self, kind: DocumentKind, doc_id: str) -> Path:
        return self._root / _SUBDIRS[kind] / f"{doc_id}.json"

    def _lock(self, kind: DocumentKind, doc_id: str) -> threading.Lock:
        with self._master:
            return self._locks.setdefault((kind, doc_id), threading.Lock())

    def put(
        self,
        kind: DocumentKind,
        doc_id: str,
        body: str,
        expected_version: int | None = None,
    ) -> int:
        """Write one document atomically; returns the stored version.

        Args:
            kind: Document family (graph or session).
            doc_id: Document id; also the file name stem.
            body: Full JSON text embedding the new ``version``.
            expected_version: When given, the write succeeds only if the
                currently stored version equals it (compare-and-swap).

        Raises:
            ValueError: If the id is unsafe or the body embeds no version.
            NotFoundError: If a conditional write targets a missing document.
            VersionConflictError: If the stored version moved.
            IoFailureError: On filesystem failure.
        """
        if not _SAFE_ID.match(doc_id):
            raise ValueError(f"unsafe document id: {doc_id!r}")
        new_version = _body_version(body)
        path = self._path(kind, doc_id)
        with self._lock(kind, doc_id):
            if expected_version is not None:
                current = self._read_version(kind, doc_id, path)
                if current != expected_version:
                    raise VersionConflictError(expected=expected_version, actual=current)
            tmp_path = path.with_name(f".{doc_id}.{uuid.uuid4().hex}.tmp")
            try:
                with open(tmp_path, "w", encoding="utf-8", newline="\n") as handle:
                    handle.write(body)
                    handle.flush()
                    os.fsync(handle.fileno())
                os.replace(tmp_path, path)
            except OSError as exc:
                raise IoFailureError(f"cannot write {path}: {exc}") from exc
            finally:
                if tmp_path.exists():
                    try:
                        os.remove(tmp_path)
                    except OSError:
                        pass
        return new_version

    def _read_version(self, kind: DocumentKind, doc_id: str, path: Path) -> int:
        try:
            body = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise NotFoundError(kind.value, doc_id) from None
        except OSError as exc:
            raise IoFailureError(f"cannot read {path}: {exc}") from exc
        try:
            return _body_version(body)
        except ValueError as exc:
            raise IoFailureError(f"stored document {path} is corrupt: {exc}") from exc

    def get(self, kind: DocumentKind, doc_id: str) -> StoredDocument:
        """Read one document.

        Raises:
            NotFoundError: If it does not exist (or the id is unsafe).
            IoFailureError: If the stored body is unreadable or corrupt.
        """
        if not _SAFE_ID.match(doc_id):
            raise NotFoundError(kind.value, doc_id)
        path = self._path(kind, doc_id)
        try:
            body = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise NotFoundError(kind.value, doc_id) from None
        except OSError as exc:
            raise IoFailureError(f"cannot read {path}: {exc}") from exc
        try:
            version = _body_version(body)
        except ValueError as exc:
            raise IoFailureError(f"stored document {path} is corrupt: {exc}") from exc
        return StoredDocument(kind=kind, id=doc_id, version=version, body=body)

    def delete(self, kind: DocumentKind, doc_id: str) -> None:
        """Remove one document.

        Raises:
            NotFoundError: If it does not exist.
        """
        if not _SAFE_ID.match(doc_id):
            raise NotFoundError(kind.value, doc_id)
        with self._lock(kind, doc_id):
            try:
                os.remove(self._path(kind, doc_id))
            except FileNotFoundError:
                raise NotFoundError(kind.value, doc_id) from None
            except OSError as exc:
                raise IoFailureError(f"cannot delete {doc_id}: {exc}") from exc

    def list_ids(self, kind: DocumentKind) -> tuple[str, ...]:
        """Ids of all stored documents of one kind, sorted."""
        directory = self._root / _SUBDIRS[kind]
        try:
            names = [
                p.stem
                for p in directory.iterdir()
                if p.suffix == ".json" and not p.name.startswith(".")
            ]
        except OSError as exc:
            raise IoFailureError(f"cannot list {directory}: {exc}") from exc
        return tuple(sorted(names))
