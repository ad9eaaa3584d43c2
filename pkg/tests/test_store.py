"""Document store: atomic writes, optimistic concurrency, crash safety."""
from __future__ import annotations

import json
import threading

import pytest

import gloss.service.store as store_module
from gloss.errors import IoFailureError, NotFoundError, VersionConflictError
from gloss.service.store import DocumentKind, DocumentStore


def _doc(version: int, payload: str = "x") -> str:
    return json.dumps({"version": version, "payload": payload}, sort_keys=True) + "\n"


@pytest.fixture
def store(tmp_path):
    return DocumentStore(tmp_path)


def test_put_get_round_trip(store):
    body = _doc(1)
    assert store.put(DocumentKind.GRAPH, "g-1", body) == 1
    doc = store.get(DocumentKind.GRAPH, "g-1")
    assert doc.body == body
    assert doc.version == 1
    assert doc.id == "g-1"
    assert doc.kind is DocumentKind.GRAPH


def test_kinds_are_separate_namespaces(store):
    store.put(DocumentKind.GRAPH, "same-id", _doc(1, "graph"))
    store.put(DocumentKind.SESSION, "same-id", _doc(1, "session"))
    assert "graph" in store.get(DocumentKind.GRAPH, "same-id").body
    assert "session" in store.get(DocumentKind.SESSION, "same-id").body


def test_get_missing_raises(store):
    with pytest.raises(NotFoundError):
        store.get(DocumentKind.GRAPH, "ghost")


def test_delete(store):
    store.put(DocumentKind.GRAPH, "g-1", _doc(1))
    store.delete(DocumentKind.GRAPH, "g-1")
    with pytest.raises(NotFoundError):
        store.get(DocumentKind.GRAPH, "g-1")
    with pytest.raises(NotFoundError):
        store.delete(DocumentKind.GRAPH, "g-1")


def test_list_ids_sorted_and_clean(store, tmp_path):
    for doc_id in ("g-b", "g-a", "g-c"):
        store.put(DocumentKind.GRAPH, doc_id, _doc(1))
    (tmp_path / "graphs" / ".g-x.12345.tmp").write_text("{}", encoding="utf-8")
    assert store.list_ids(DocumentKind.GRAPH) == ("g-a", "g-b", "g-c")


@pytest.mark.parametrize("bad_id", ["", ".hidden", "a/b", "../up", "-lead", "x" * 200, "sp ace"])
def test_unsafe_ids_rejected(store, bad_id):
    with pytest.raises(ValueError):
        store.put(DocumentKind.GRAPH, bad_id, _doc(1))


def test_body_must_embed_version(store):
    with pytest.raises(ValueError):
        store.put(DocumentKind.GRAPH, "g-1", json.dumps({"payload": "x"}))
    with pytest.raises(ValueError):
        store.put(DocumentKind.GRAPH, "g-1", json.dumps({"version": 0}))
    with pytest.raises(ValueError):
        store.put(DocumentKind.GRAPH, "g-1", json.dumps({"version": True}))


def test_cas_happy_path(store):
    store.put(DocumentKind.GRAPH, "g-1", _doc(1))
    assert store.put(DocumentKind.GRAPH, "g-1", _doc(2), expected_version=1) == 2


def test_cas_version_mismatch(store):
    store.put(DocumentKind.GRAPH, "g-1", _doc(3))
    with pytest.raises(VersionConflictError) as err:
        store.put(DocumentKind.GRAPH, "g-1", _doc(4), expected_version=2)
    assert err.value.expected == 2
    assert err.value.actual == 3
    assert store.get(DocumentKind.GRAPH, "g-1").version == 3


def test_cas_on_missing_document(store):
    with pytest.raises(NotFoundError):
        store.put(DocumentKind.GRAPH, "g-1", _doc(2), expected_version=1)


def test_unconditional_put_overwrites(store):
    store.put(DocumentKind.GRAPH, "g-1", _doc(5))
    store.put(DocumentKind.GRAPH, "g-1", _doc(2))
    assert store.get(DocumentKind.GRAPH, "g-1").version == 2


def test_corrupt_file_surfaces_io_failure(store, tmp_path):
    store.put(DocumentKind.GRAPH, "g-1", _doc(1))
    (tmp_path / "graphs" / "g-1.json").write_text("{truncated", encoding="utf-8")
    with pytest.raises(IoFailureError):
        store.get(DocumentKind.GRAPH, "g-1")


def test_kill_between_temp_write_and_rename_preserves_old_doc(store, tmp_path, monkeypatch):
    store.put(DocumentKind.GRAPH, "g-1", _doc(1, "original"))

    def exploding_replace(src, dst):
        raise OSError("killed before rename")

    monkeypatch.setattr(store_module.os, "replace", exploding_replace)
    with pytest.raises(IoFailureError):
        store.put(DocumentKind.GRAPH, "g-1", _doc(2, "updated"))
    monkeypatch.undo()

    doc = store.get(DocumentKind.GRAPH, "g-1")
    assert json.loads(doc.body)["payload"] == "original"
    assert doc.version == 1
    leftovers = [p for p in (tmp_path / "graphs").iterdir() if p.name.startswith(".")]
    assert leftovers == []


def test_kill_on_first_write_leaves_no_document(store, tmp_path, monkeypatch):
    def exploding_replace(src, dst):
        raise OSError("killed")

    monkeypatch.setattr(store_module.os, "replace", exploding_replace)
    with pytest.raises(IoFailureError):
        store.put(DocumentKind.GRAPH, "g-new", _doc(1))
    monkeypatch.undo()
    with pytest.raises(NotFoundError):
        store.get(DocumentKind.GRAPH, "g-new")
    assert store.list_ids(DocumentKind.GRAPH) == ()


def test_random_kill_points_never_corrupt(store, monkeypatch, rng):
    real_replace = store_module.os.replace
    doc_id = "g-crash"
    store.put(DocumentKind.GRAPH, doc_id, _doc(1))
    last_good = 1
    for version in range(2, 40):
        kill = rng.random() < 0.5

        def maybe_replace(src, dst, _kill=kill):
            if _kill:
                raise OSError("simulated kill")
            real_replace(src, dst)

        monkeypatch.setattr(store_module.os, "replace", maybe_replace)
        try:
            store.put(DocumentKind.GRAPH, doc_id, _doc(version), expected_version=last_good)
            last_good = version
        except IoFailureError:
            pass
        finally:
            monkeypatch.setattr(store_module.os, "replace", real_replace)
        doc = store.get(DocumentKind.GRAPH, doc_id)
        parsed = json.loads(doc.body)  # must always parse
        assert parsed["version"] == last_good


def test_concurrent_cas_exactly_one_winner(store):
    store.put(DocumentKind.GRAPH, "g-race", _doc(1))
    barrier = threading.Barrier(8)
    results: list[str] = []
    lock = threading.Lock()

    def contender(worker: int) -> None:
        barrier.wait()
        try:
            store.put(
                DocumentKind.GRAPH,
                "g-race",
                _doc(2, f"worker-{worker}"),
                expected_version=1,
            )
            outcome = "won"
        except VersionConflictError:
            outcome = "lost"
        with lock:
            results.append(outcome)

    threads = [threading.Thread(target=contender, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results.count("won") == 1
    assert results.count("lost") == 7
    assert store.get(DocumentKind.GRAPH, "g-race").version == 2


def test_concurrent_writers_distinct_ids(store):
    barrier = threading.Barrier(10)
    errors: list[Exception] = []

    def writer(worker: int) -> None:
        barrier.wait()
        try:
            for version in range(1, 6):
                store.put(DocumentKind.SESSION, f"s-{worker}", _doc(version))
        except Exception as exc:  # noqa: BLE001 - collected for the assertion
            errors.append(exc)

    threads = [threading.Thread(target=writer, args=(i,)) for i in range(10)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert errors == []
    assert len(store.list_ids(DocumentKind.SESSION)) == 10
    for worker in range(10):
        assert store.get(DocumentKind.SESSION, f"s-{worker}").version == 5
