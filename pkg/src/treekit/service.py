"""Local HTTP facade over snapshots, reduction, and annotation.

Single-user tool: binds loopback by default, no authentication. Snapshots are
immutable per collection; annotation writes are serialized per collection id;
reduction responses are cached per (id, t quantized to 1/100) and byte-stable.
"""

from __future__ import annotations

import json
import sys
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import annotation as ann
from . import ingest, reduction
from .tree import FolderNode, FolderTree, metrics

__all__ = ["Collection", "CollectionRegistry", "create_app"]

_STATIC_DIR = Path(__file__).parent / "_static"


@dataclass
class Collection:
    id: str
    tree: FolderTree
    store: ann.AnnotationStore
    lock: threading.Lock = field(default_factory=threading.Lock)
    reduced_cache: dict[int, bytes] = field(default_factory=dict)


class CollectionRegistry:
    """Process-lifetime store of loaded collections."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._collections: dict[str, Collection] = {}

    def add(self, tree: FolderTree) -> Collection:
        with self._lock:
            cid = uuid.uuid4().hex[:12]
            while cid in self._collections:
                cid = uuid.uuid4().hex[:12]
            collection = Collection(
                id=cid, tree=tree, store=ann.AnnotationStore.empty(tree.root.name)
            )
            self._collections[cid] = collection
            return collection

    def get(self, cid: str) -> Collection | None:
        with self._lock:
            return self._collections.get(cid)

    def ids(self) -> list[str]:
        with self._lock:
            return list(self._collections)


def _error(status: int, detail: str) -> JSONResponse:
    return JSONResponse({"detail": detail}, status_code=status)


def _json_bytes(payload: dict) -> bytes:
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20_000))
    try:
        return json.dumps(payload, ensure_ascii=False, separators=(",", ":")).encode() + b"\n"
    finally:
        sys.setrecursionlimit(limit)


def _sorted_view_document(
    tree: FolderTree, statuses: dict[str, ann.EffectiveStatus], by: str, order: str
) -> dict:
    def node_doc(node: FolderNode, path: str) -> dict:
        status = statuses[path]
        status_doc: dict = {"kind": status.kind}
        if status.origin is not None:
            status_doc["origin"] = status.origin
        doc: dict = {
            "name": node.name,
            "direct_files": node.direct_files,
            "accessible_files": node.accessible_files,
            "modified_at": ingest.format_timestamp(node.modified_at),
            "status": status_doc,
            "children": [
                node_doc(child, path + "/" + child.name) for child in node.children
            ],
        }
        return doc

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20_000))
    try:
        return {
            "format_version": ingest.FORMAT_VERSION,
            "source": tree.source,
            "scanned_at": ingest.format_timestamp(tree.scanned_at),
            "sort": {"by": by, "order": order},
            "root": node_doc(tree.root, tree.root.name),
        }
    finally:
        sys.setrecursionlimit(limit)


_SORT_BY = {"accessible": "accessible_files", "modified": "modified_at"}


def create_app(
    registry: CollectionRegistry | None = None, ui_dir: str | Path | None = None
) -> FastAPI:
    registry = registry if registry is not None else CollectionRegistry()
    app = FastAPI(title="treekit", docs_url=None, redoc_url=None)
    app.state.registry = registry

    @app.post("/collections", status_code=201)
    async def create_collection(request: Request) -> Response:
        body = await request.body()
        try:
            raw = json.loads(body)
        except json.JSONDecodeError as exc:
            return _error(400, f"invalid JSON: {exc}")
        if isinstance(raw, dict) and "scan_path" in raw:
            scan_path = raw["scan_path"]
            if not isinstance(scan_path, str):
                return _error(400, "scan_path must be a string")
            try:
                result = ingest.scan(scan_path)
            except ingest.ScanError as exc:
                return _error(404, str(exc))
            tree = result.tree
        else:
            try:
                tree = ingest.parse_snapshot(body)
            except ingest.SnapshotParseError as exc:
                return _error(400, str(exc))
        collection = registry.add(tree)
        m = metrics(tree)
        return JSONResponse(
            {
                "id": collection.id,
                "metrics": {
                    "folder_count": m.folder_count,
                    "max_depth": m.max_depth,
                    "total_files": m.total_files,
                    "retained_file_fraction": m.retained_file_fraction,
                },
            },
            status_code=201,
        )

    @app.get("/collections/{cid}/tree")
    def get_reduced_tree(cid: str, t: str = "0") -> Response:
        collection = registry.get(cid)
        if collection is None:
            return _error(404, f"unknown collection {cid!r}")
        try:
            strength = reduction.check_strength(float(t))
        except ValueError:
            return _error(400, f"t must be a number in [0, 1], got {t!r}")
        # Quantized to the UI slider's 1/100 steps; the cache key is exact.
        step = round(strength * 100)
        cached = collection.reduced_cache.get(step)
        if cached is None:
            reduced = reduction.reduce(collection.tree, step / 100.0)
            cached = reduction.reduced_bytes(reduced)
            collection.reduced_cache[step] = cached
        return Response(content=cached, media_type="application/json")

    @app.get("/collections/{cid}/sorted")
    def get_sorted(cid: str, by: str = "accessible", order: str = "desc") -> Response:
        collection = registry.get(cid)
        if collection is None:
            return _error(404, f"unknown collection {cid!r}")
        key = _SORT_BY.get(by)
        if key is None:
            return _error(400, f"by must be one of {sorted(_SORT_BY)}, got {by!r}")
        if order not in ("asc", "desc"):
            return _error(400, f"order must be 'asc' or 'desc', got {order!r}")
        ordered = ann.sort_folders(collection.tree, key, order)
        statuses = ann.resolve_all(collection.store, collection.tree)
        doc = _sorted_view_document(ordered, statuses, by, order)
        return Response(content=_json_bytes(doc), media_type="application/json")

    @app.get("/collections/{cid}/profile")
    def get_profile(cid: str, grid: str = "0:0.01:1") -> Response:
        collection = registry.get(cid)
        if collection is None:
            return _error(404, f"unknown collection {cid!r}")
        try:
            values = reduction.parse_grid_spec(grid)
        except ValueError as exc:
            return _error(400, str(exc))
        prof = reduction.profile(collection.tree, values)
        rows = [
            {
                "t": row.t,
                "folder_count": row.folder_count,
                "max_depth": row.max_depth,
                "retained_file_fraction": row.retained_file_fraction,
            }
            for row in prof.rows
        ]
        return Response(content=_json_bytes({"rows": rows}), media_type="application/json")

    @app.get("/collections/{cid}/annotations")
    def get_annotations(cid: str) -> Response:
        collection = registry.get(cid)
        if collection is None:
            return _error(404, f"unknown collection {cid!r}")
        with collection.lock:
            payload = ann.annotations_bytes(collection.store)
        return Response(content=payload, media_type="application/json")

    @app.put("/collections/{cid}/annotations")
    async def import_annotations(cid: str, request: Request) -> Response:
        collection = registry.get(cid)
        if collection is None:
            return _error(404, f"unknown collection {cid!r}")
        body = await request.body()
        try:
            store = ann.parse_annotations(body)
        except ann.AnnotationParseError as exc:
            return _error(400, str(exc))
        if store.collection_root != collection.tree.root.name:
            return _error(
                400,
                f"collection_root {store.collection_root!r} does not match "
                f"snapshot root {collection.tree.root.name!r}",
            )
        for path in store.entries:
            if ann.node_at(collection.tree, path) is None:
                return _error(400, f"entry path {path!r} is not in the snapshot")
        with collection.lock:
            collection.store = store
        return Response(status_code=204)

    @app.put("/collections/{cid}/annotations/{path:path}")
    async def put_annotation(cid: str, path: str, request: Request) -> Response:
        collection = registry.get(cid)
        if collection is None:
            return _error(404, f"unknown collection {cid!r}")
        body = await request.body()
        try:
            raw = json.loads(body)
        except json.JSONDecodeError as exc:
            return _error(400, f"invalid JSON: {exc}")
        if not isinstance(raw, dict):
            return _error(400, "annotation body must be an object")
        contexts = raw.get("contexts", [])
        if not isinstance(contexts, list) or not all(isinstance(c, str) for c in contexts):
            return _error(400, "contexts must be a list of strings")
        note = raw.get("note")
        if note is not None and not isinstance(note, str):
            return _error(400, "note must be a string")
        try:
            status = ann.AnnotationStatus(
                kind=raw.get("kind"), contexts=frozenset(contexts), note=note
            )
        except ValueError as exc:
            return _error(400, str(exc))
        with collection.lock:
            try:
                collection.store = ann.set_annotation(
                    collection.store, collection.tree, path, status
                )
            except ann.ExclusionConflictError as exc:
                return _error(409, str(exc))
            except ann.PathNotFoundError as exc:
                return _error(404, str(exc))
            except ValueError as exc:
                return _error(400, str(exc))
        return Response(status_code=204)

    @app.delete("/collections/{cid}/annotations/{path:path}")
    def delete_annotation(cid: str, path: str) -> Response:
        collection = registry.get(cid)
        if collection is None:
            return _error(404, f"unknown collection {cid!r}")
        with collection.lock:
            try:
                collection.store = ann.clear_annotation(collection.store, path)
            except ann.EntryNotFoundError as exc:
                return _error(404, str(exc))
            except ValueError as exc:
                return _error(400, str(exc))
        return Response(status_code=204)

    static_dir = Path(ui_dir) if ui_dir is not None else _STATIC_DIR
    if static_dir.is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
