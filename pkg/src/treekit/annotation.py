"""Collection annotation: relevance/exclusion marks that flow down the tree,
software notes, sorting heuristics for fast appraisal, and the canonical
JSON annotation document.

Exclusion is a hard boundary: nothing below an excluded folder can be marked
relevant, and any excluded ancestor wins at resolution time.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from .ingest import atomic_write, format_timestamp, parse_timestamp
from .tree import FolderNode, FolderTree, iter_paths, utc_second

__all__ = [
    "RELEVANT",
    "EXCLUDED",
    "SUGGESTED_CONTEXTS",
    "AnnotationStatus",
    "SoftwareNote",
    "AnnotationStore",
    "EffectiveStatus",
    "CoverageSummary",
    "AnnotationError",
    "PathNotFoundError",
    "EntryNotFoundError",
    "ExclusionConflictError",
    "AnnotationParseError",
    "DuplicateEntryError",
    "normalize_path",
    "node_at",
    "set_annotation",
    "clear_annotation",
    "add_software_note",
    "effective_status",
    "resolve_all",
    "coverage_summary",
    "sort_folders",
    "annotations_document",
    "annotations_bytes",
    "parse_annotations",
    "save_annotations",
    "load_annotations",
]

FORMAT_VERSION = 1

RELEVANT = "relevant"
EXCLUDED = "excluded"

# Illustrative vocabulary only; contexts are free-text tags.
SUGGESTED_CONTEXTS = ("theme", "career", "family", "institution", "society")


class AnnotationError(Exception):
    pass


class PathNotFoundError(AnnotationError):
    def __init__(self, path: str) -> None:
        self.path = path
        super().__init__(f"no folder at {path!r} in the snapshot")


class EntryNotFoundError(AnnotationError):
    def __init__(self, path: str) -> None:
        self.path = path
        super().__init__(f"no annotation at {path!r}")


class ExclusionConflictError(AnnotationError):
    """Relevance was requested beneath an explicitly excluded ancestor."""

    def __init__(self, path: str, ancestor: str) -> None:
        self.path = path
        self.ancestor = ancestor
        super().__init__(
            f"cannot mark {path!r} relevant: ancestor {ancestor!r} is excluded"
        )


class AnnotationParseError(AnnotationError):
    def __init__(self, message: str, element: str = "") -> None:
        self.element = element
        where = f" at {element}" if element else ""
        super().__init__(f"{message}{where}")


class DuplicateEntryError(AnnotationParseError):
    def __init__(self, path: str) -> None:
        super().__init__(f"duplicate entry for path {path!r}", "entries")
        self.path = path


def normalize_path(path: str) -> str:
    """Validate a folder path: forward slashes, no leading/trailing slash,
    no empty, '.' or '..' segments."""
    if not isinstance(path, str) or path == "":
        raise ValueError("path must be a non-empty string")
    segments = path.split("/")
    for segment in segments:
        if segment in ("", ".", ".."):
            raise ValueError(f"invalid path {path!r}")
    return "/".join(segments)


@dataclass(frozen=True)
class AnnotationStatus:
    kind: str
    contexts: frozenset[str] = frozenset()
    note: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in (RELEVANT, EXCLUDED):
            raise ValueError(f"kind must be {RELEVANT!r} or {EXCLUDED!r}, got {self.kind!r}")
        tags = frozenset(str(tag).strip() for tag in self.contexts)
        if any(tag == "" for tag in tags):
            raise ValueError("context tags must be non-empty")
        if self.kind == EXCLUDED and tags:
            raise ValueError("excluded entries carry no contexts")
        object.__setattr__(self, "contexts", tags)


@dataclass(frozen=True)
class SoftwareNote:
    """Software needed to open some content: an extension like 'psd', or a
    folder path, mapped to the program (plus an optional free-text note)."""

    applies_to: str
    software: str
    note: str | None = None

    def __post_init__(self) -> None:
        if not self.applies_to:
            raise ValueError("applies_to must be non-empty")
        if not self.software:
            raise ValueError("software must be non-empty")

    def sort_key(self) -> tuple:
        return (self.applies_to, self.software, self.note or "")


@dataclass(frozen=True)
class AnnotationStore:
    """Per-path marks plus collection-level software notes. Value-style:
    mutating operations return a new store."""

    collection_root: str
    entries: dict[str, AnnotationStatus]
    software_notes: tuple[SoftwareNote, ...]
    modified_at: datetime

    @staticmethod
    def empty(collection_root: str, now: datetime | None = None) -> "AnnotationStore":
        return AnnotationStore(
            collection_root=collection_root,
            entries={},
            software_notes=(),
            modified_at=utc_second(now or datetime.now(timezone.utc)),
        )


@dataclass(frozen=True)
class EffectiveStatus:
    kind: str  # relevant | excluded | unmarked
    origin: str | None = None


@dataclass(frozen=True)
class CoverageSummary:
    relevant_files: int
    excluded_files: int
    unmarked_files: int


def node_at(tree: FolderTree, path: str) -> FolderNode | None:
    segments = path.split("/")
    node = tree.root
    if segments[0] != node.name:
        return None
    for segment in segments[1:]:
        for child in node.children:
            if child.name == segment:
                node = child
                break
        else:
            return None
    return node


def _ancestor_paths(path: str) -> list[str]:
    """Proper ancestors of a path, from the root downward."""
    segments = path.split("/")
    return ["/".join(segments[: i + 1]) for i in range(len(segments) - 1)]


def _touch(store: AnnotationStore, now: datetime | None) -> datetime:
    return utc_second(now or datetime.now(timezone.utc))


def set_annotation(
    store: AnnotationStore,
    tree: FolderTree,
    path: str,
    status: AnnotationStatus,
    now: datetime | None = None,
) -> AnnotationStore:
    """Upsert a mark. Relevance fails if any ancestor is explicitly excluded
    (the topmost such ancestor is reported); exclusion is always allowed and
    shadows deeper relevance at resolution time."""
    path = normalize_path(path)
    if node_at(tree, path) is None:
        raise PathNotFoundError(path)
    if status.kind == RELEVANT:
        for ancestor in _ancestor_paths(path):
            entry = store.entries.get(ancestor)
            if entry is not None and entry.kind == EXCLUDED:
                raise ExclusionConflictError(path, ancestor)
    entries = dict(store.entries)
    entries[path] = status
    return replace(store, entries=entries, modified_at=_touch(store, now))


def clear_annotation(
    store: AnnotationStore, path: str, now: datetime | None = None
) -> AnnotationStore:
    path = normalize_path(path)
    if path not in store.entries:
        raise EntryNotFoundError(path)
    entries = dict(store.entries)
    del entries[path]
    return replace(store, entries=entries, modified_at=_touch(store, now))


def add_software_note(
    store: AnnotationStore, note: SoftwareNote, now: datetime | None = None
) -> AnnotationStore:
    notes = tuple(sorted(store.software_notes + (note,), key=SoftwareNote.sort_key))
    return replace(store, software_notes=notes, modified_at=_touch(store, now))


def effective_status(
    store: AnnotationStore, tree: FolderTree, path: str
) -> EffectiveStatus:
    """The mark governing a folder: the topmost excluded entry on the root
    path wins outright, otherwise the nearest annotated ancestor-or-self."""
    path = normalize_path(path)
    if node_at(tree, path) is None:
        raise PathNotFoundError(path)
    nearest: str | None = None
    for candidate in _ancestor_paths(path) + [path]:
        entry = store.entries.get(candidate)
        if entry is None:
            continue
        if entry.kind == EXCLUDED:
            return EffectiveStatus(EXCLUDED, candidate)
        nearest = candidate
    if nearest is None:
        return EffectiveStatus("unmarked", None)
    return EffectiveStatus(RELEVANT, nearest)


def resolve_all(store: AnnotationStore, tree: FolderTree) -> dict[str, EffectiveStatus]:
    """Effective status of every folder in one pass."""
    resolved: dict[str, EffectiveStatus] = {}
    # (path, node, excluding ancestor-or-self, nearest relevant ancestor-or-self)
    stack: list[tuple[str, FolderNode, str | None, str | None]] = [
        (tree.root.name, tree.root, None, None)
    ]
    while stack:
        path, node, excluded_by, relevant_by = stack.pop()
        entry = store.entries.get(path)
        if excluded_by is None and entry is not None:
            if entry.kind == EXCLUDED:
                excluded_by = path
            else:
                relevant_by = path
        if excluded_by is not None:
            resolved[path] = EffectiveStatus(EXCLUDED, excluded_by)
        elif relevant_by is not None:
            resolved[path] = EffectiveStatus(RELEVANT, relevant_by)
        else:
            resolved[path] = EffectiveStatus("unmarked", None)
        for child in node.children:
            stack.append((path + "/" + child.name, child, excluded_by, relevant_by))
    return resolved


def coverage_summary(store: AnnotationStore, tree: FolderTree) -> CoverageSummary:
    """Attribute every file to exactly one bucket via its folder's status."""
    resolved = resolve_all(store, tree)
    relevant = excluded = unmarked = 0
    for path, node in iter_paths(tree):
        kind = resolved[path].kind
        if kind == RELEVANT:
            relevant += node.direct_files
        elif kind == EXCLUDED:
            excluded += node.direct_files
        else:
            unmarked += node.direct_files
    return CoverageSummary(relevant, excluded, unmarked)


_SORT_KEYS = ("accessible_files", "modified_at")


def sort_folders(tree: FolderTree, key: str, order: str = "desc") -> FolderTree:
    """Sort every sibling group by the key, ties by name ascending; the
    hierarchy itself is untouched."""
    if key not in _SORT_KEYS:
        raise ValueError(f"key must be one of {_SORT_KEYS}, got {key!r}")
    if order not in ("asc", "desc"):
        raise ValueError(f"order must be 'asc' or 'desc', got {order!r}")
    reverse = order == "desc"

    def rebuild(root: FolderNode) -> FolderNode:
        # Bottom-up over an explicit preorder index; trees can be deep.
        nodes: list[FolderNode] = []
        parents: list[int] = []
        stack: list[tuple[FolderNode, int]] = [(root, -1)]
        while stack:
            node, parent = stack.pop()
            idx = len(nodes)
            nodes.append(node)
            parents.append(parent)
            for child in reversed(node.children):
                stack.append((child, idx))
        child_idx: list[list[int]] = [[] for _ in nodes]
        for i in range(1, len(nodes)):
            child_idx[parents[i]].append(i)
        built: list[FolderNode | None] = [None] * len(nodes)
        for i in range(len(nodes) - 1, -1, -1):
            children = [built[j] for j in child_idx[i]]
            children.sort(key=lambda c: c.name)
            children.sort(key=lambda c: getattr(c, key), reverse=reverse)
            built[i] = replace(nodes[i], children=tuple(children))
        return built[0]  # type: ignore[return-value]

    return replace(tree, root=rebuild(tree.root))


# --- canonical annotation document ------------------------------------------


def annotations_document(store: AnnotationStore) -> dict:
    entries = []
    for path in sorted(store.entries):
        status = store.entries[path]
        entry: dict = {
            "path": path,
            "kind": status.kind,
            "contexts": sorted(status.contexts),
        }
        if status.note is not None:
            entry["note"] = status.note
        entries.append(entry)
    notes = []
    for note in sorted(store.software_notes, key=SoftwareNote.sort_key):
        item: dict = {"applies_to": note.applies_to, "software": note.software}
        if note.note is not None:
            item["note"] = note.note
        notes.append(item)
    return {
        "format_version": FORMAT_VERSION,
        "collection_root": store.collection_root,
        "modified_at": format_timestamp(store.modified_at),
        "entries": entries,
        "software_notes": notes,
    }


def annotations_bytes(store: AnnotationStore) -> bytes:
    doc = annotations_document(store)
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":")).encode() + b"\n"


def _expect(condition: bool, message: str, element: str) -> None:
    if not condition:
        raise AnnotationParseError(message, element)


def _parse_optional_note(obj: dict, element: str) -> str | None:
    note = obj.get("note")
    _expect(note is None or isinstance(note, str), "note must be a string", f"{element}.note")
    return note


def parse_annotations(data: bytes | str) -> AnnotationStore:
    """Parse and validate an annotation document. Entry order in the file is
    irrelevant; saving canonicalizes it."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise AnnotationParseError(f"invalid JSON: {exc}") from exc
    _expect(isinstance(raw, dict), "document must be an object", "")
    version = raw.get("format_version")
    if version != FORMAT_VERSION:
        raise AnnotationParseError(
            f"unsupported format_version {version!r}", "format_version"
        )
    root = raw.get("collection_root")
    _expect(isinstance(root, str) and root != "", "collection_root must be a non-empty string", "collection_root")
    modified = parse_timestamp(raw.get("modified_at"), "modified_at")
    entries_raw = raw.get("entries")
    _expect(isinstance(entries_raw, list), "entries must be a list", "entries")
    entries: dict[str, AnnotationStatus] = {}
    for i, item in enumerate(entries_raw):
        element = f"entries[{i}]"
        _expect(isinstance(item, dict), "entry must be an object", element)
        path_raw = item.get("path")
        _expect(isinstance(path_raw, str), "path must be a string", f"{element}.path")
        try:
            path = normalize_path(path_raw)
        except ValueError as exc:
            raise AnnotationParseError(str(exc), f"{element}.path") from exc
        if path in entries:
            raise DuplicateEntryError(path)
        kind = item.get("kind")
        _expect(kind in (RELEVANT, EXCLUDED), f"kind must be '{RELEVANT}' or '{EXCLUDED}'", f"{element}.kind")
        contexts_raw = item.get("contexts", [])
        _expect(
            isinstance(contexts_raw, list) and all(isinstance(c, str) for c in contexts_raw),
            "contexts must be a list of strings",
            f"{element}.contexts",
        )
        try:
            status = AnnotationStatus(
                kind=kind,
                contexts=frozenset(contexts_raw),
                note=_parse_optional_note(item, element),
            )
        except ValueError as exc:
            raise AnnotationParseError(str(exc), element) from exc
        entries[path] = status
    notes_raw = raw.get("software_notes", [])
    _expect(isinstance(notes_raw, list), "software_notes must be a list", "software_notes")
    notes = []
    for i, item in enumerate(notes_raw):
        element = f"software_notes[{i}]"
        _expect(isinstance(item, dict), "software note must be an object", element)
        applies_to = item.get("applies_to")
        software = item.get("software")
        _expect(isinstance(applies_to, str) and applies_to != "", "applies_to must be a non-empty string", f"{element}.applies_to")
        _expect(isinstance(software, str) and software != "", "software must be a non-empty string", f"{element}.software")
        notes.append(
            SoftwareNote(applies_to, software, _parse_optional_note(item, element))
        )
    return AnnotationStore(
        collection_root=root,
        entries=entries,
        software_notes=tuple(sorted(notes, key=SoftwareNote.sort_key)),
        modified_at=modified,
    )


def save_annotations(store: AnnotationStore, destination: str | os.PathLike) -> None:
    atomic_write(destination, annotations_bytes(store))


def load_annotations(source: str | os.PathLike) -> AnnotationStore:
    return parse_annotations(Path(source).read_bytes())
