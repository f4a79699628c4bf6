"""Produce folder-tree snapshots (file-system scan or seeded synthesis) and
read/write the canonical snapshot interchange format.

Snapshot files never list individual files, only per-folder counts and
timestamps.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .tree import FolderNode, FolderTree, recompute_aggregates, utc_second

__all__ = [
    "ScanOptions",
    "ScanResult",
    "SynthParams",
    "ScanError",
    "CycleError",
    "SnapshotParseError",
    "UnsupportedVersionError",
    "scan",
    "generate_synthetic",
    "snapshot_bytes",
    "parse_snapshot",
    "write_snapshot",
    "read_snapshot",
]

FORMAT_VERSION = 1

# Fixed reference instant for synthetic trees: mtimes fall in the two years
# before it and scanned_at equals it, keeping snapshots seed-deterministic.
SYNTH_EPOCH = datetime(2022, 7, 1, tzinfo=timezone.utc)
_SYNTH_WINDOW_SECONDS = 2 * 365 * 24 * 3600


class ScanError(Exception):
    """The scan root is missing, unreadable, or not a directory."""


class CycleError(ScanError):
    """A symlink cycle was found while following symlinks."""

    def __init__(self, path: str) -> None:
        self.path = path
        super().__init__(f"symlink cycle at {path!r}")


class SnapshotParseError(Exception):
    """A snapshot document is malformed; ``element`` points at the offender."""

    def __init__(self, message: str, element: str = "") -> None:
        self.element = element
        where = f" at {element}" if element else ""
        super().__init__(f"{message}{where}")


class UnsupportedVersionError(SnapshotParseError):
    def __init__(self, version: object) -> None:
        super().__init__(f"unsupported format_version {version!r}", "format_version")
        self.version = version


@dataclass(frozen=True)
class ScanOptions:
    follow_symlinks: bool = False
    max_depth_limit: int | None = None
    excluded_names: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.max_depth_limit is not None and self.max_depth_limit < 0:
            raise ValueError("max_depth_limit must be >= 0")
        object.__setattr__(self, "excluded_names", frozenset(self.excluded_names))


@dataclass(frozen=True)
class ScanResult:
    tree: FolderTree
    warnings: tuple[str, ...]


@dataclass(frozen=True)
class SynthParams:
    """Knobs for the seeded synthetic generator.

    ``depth_bias`` is the probability that a new folder attaches below the
    previously created one (deep growth) instead of a uniformly random open
    folder (wide growth). Direct file counts are floor(scale * Pareto-II
    draws), so heavy-tailed with plenty of empty folders.
    """

    target_folder_count: int
    max_children: int = 8
    depth_bias: float = 0.3
    pareto_alpha: float = 1.1
    scale: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.target_folder_count < 1:
            raise ValueError("target_folder_count must be >= 1")
        if self.max_children < 1:
            raise ValueError("max_children must be >= 1")
        if not 0.0 < self.depth_bias < 1.0:
            raise ValueError("depth_bias must be in (0, 1)")
        if self.pareto_alpha <= 0:
            raise ValueError("pareto_alpha must be positive")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


def scan(path: str | os.PathLike, opts: ScanOptions = ScanOptions()) -> ScanResult:
    """Walk a directory into a snapshot.

    One node per directory, children in name order; direct_files counts
    non-directory entries; symlinked directories are skipped unless
    ``follow_symlinks``; unreadable subdirectories become zero-child nodes and
    a warning. Deterministic for a fixed file system state.
    """
    root_path = Path(path)
    try:
        root_stat = root_path.stat()
    except OSError as exc:
        raise ScanError(f"cannot scan {str(root_path)!r}: {exc}") from exc
    if not root_path.is_dir():
        raise ScanError(f"cannot scan {str(root_path)!r}: not a directory")

    warnings: list[str] = []
    seen_on_path: set[tuple[int, int]] = set()

    def build(dir_path: Path, stat_result: os.stat_result, depth: int) -> FolderNode:
        key = (stat_result.st_dev, stat_result.st_ino)
        if opts.follow_symlinks:
            if key in seen_on_path:
                raise CycleError(str(dir_path))
            seen_on_path.add(key)
        direct = 0
        subdirs: list[tuple[str, Path, os.stat_result]] = []
        try:
            with os.scandir(dir_path) as it:
                entries = sorted(it, key=lambda e: e.name)
        except OSError as exc:
            warnings.append(f"unreadable directory {str(dir_path)!r}: {exc}")
            entries = []
        for entry in entries:
            if entry.name in opts.excluded_names:
                continue
            try:
                is_dir = entry.is_dir(follow_symlinks=True)
                is_link = entry.is_symlink()
            except OSError:
                is_dir = False
                is_link = False
            if is_dir:
                if is_link and not opts.follow_symlinks:
                    continue
                if opts.max_depth_limit is not None and depth >= opts.max_depth_limit:
                    continue
                try:
                    sub_stat = os.stat(entry.path)
                except OSError as exc:
                    warnings.append(f"unreadable directory {entry.path!r}: {exc}")
                    continue
                subdirs.append((entry.name, Path(entry.path), sub_stat))
            else:
                direct += 1
        children = tuple(
            build(sub_path, sub_stat, depth + 1) for _, sub_path, sub_stat in subdirs
        )
        if opts.follow_symlinks:
            seen_on_path.discard(key)
        return FolderNode(
            name=dir_path.name or str(dir_path),
            direct_files=direct,
            accessible_files=0,
            modified_at=utc_second(
                datetime.fromtimestamp(stat_result.st_mtime, tz=timezone.utc)
            ),
            children=children,
        )

    # Deep real hierarchies can exceed the default interpreter limit.
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20_000))
    try:
        root = build(root_path, root_stat, 0)
    finally:
        sys.setrecursionlimit(limit)
    tree = FolderTree(
        root=root,
        source=str(root_path),
        scanned_at=utc_second(datetime.now(timezone.utc)),
    )
    return ScanResult(recompute_aggregates(tree), tuple(warnings))


def generate_synthetic(params: SynthParams) -> FolderTree:
    """Grow a seeded random tree with a heavy-tailed file distribution.

    Identical params give a bit-identical snapshot: names encode creation
    order, timestamps land in a fixed two-year window ending at SYNTH_EPOCH,
    and scanned_at is SYNTH_EPOCH itself.
    """
    n = params.target_folder_count
    rng = np.random.default_rng(params.seed)

    parents = [-1] * n
    child_count = [0] * n
    open_folders = [0]  # indices with room for more children
    position = {0: 0}  # index of each open folder in open_folders, for O(1) removal
    for i in range(1, n):
        if rng.random() < params.depth_bias and child_count[i - 1] < params.max_children:
            parent = i - 1
        else:
            parent = open_folders[int(rng.integers(0, len(open_folders)))]
        parents[i] = parent
        child_count[parent] += 1
        if child_count[parent] >= params.max_children:
            slot = position.pop(parent)
            last = open_folders.pop()
            if last != parent:
                open_folders[slot] = last
                position[last] = slot
        open_folders.append(i)
        position[i] = len(open_folders) - 1

    direct = np.floor(params.scale * rng.pareto(params.pareto_alpha, n)).astype(np.int64)
    offsets = rng.integers(0, _SYNTH_WINDOW_SECONDS, size=n, dtype=np.int64)

    width = len(str(max(n - 1, 1)))
    names = ["root"] + [f"folder-{i:0{width}d}" for i in range(1, n)]
    children_idx: list[list[int]] = [[] for _ in range(n)]
    for i in range(1, n):
        children_idx[parents[i]].append(i)

    built: list[FolderNode | None] = [None] * n
    for i in range(n - 1, -1, -1):
        built[i] = FolderNode(
            name=names[i],
            direct_files=int(direct[i]),
            accessible_files=0,
            modified_at=SYNTH_EPOCH - timedelta(seconds=int(offsets[i])),
            children=tuple(built[j] for j in children_idx[i]),
        )
    tree = FolderTree(root=built[0], source="synthetic", scanned_at=SYNTH_EPOCH)
    return recompute_aggregates(tree)


# --- snapshot interchange format -------------------------------------------


def format_timestamp(dt: datetime) -> str:
    return utc_second(dt).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(value: object, element: str) -> datetime:
    if not isinstance(value, str):
        raise SnapshotParseError("timestamp must be a string", element)
    text = value[:-1] + "+00:00" if value.endswith("Z") else value
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError as exc:
        raise SnapshotParseError(f"bad timestamp {value!r}: {exc}", element) from exc
    if parsed.tzinfo is None:
        raise SnapshotParseError(f"timestamp {value!r} lacks a timezone", element)
    return utc_second(parsed)


def _node_document(node: FolderNode, sort_children: bool) -> dict:
    children = node.children
    if sort_children:
        children = tuple(sorted(children, key=lambda c: c.name))
    doc: dict = {
        "name": node.name,
        "direct_files": node.direct_files,
        "accessible_files": node.accessible_files,
        "modified_at": format_timestamp(node.modified_at),
    }
    if node.collapsed_ancestors:
        doc["collapsed_ancestors"] = list(node.collapsed_ancestors)
    doc["children"] = [_node_document(child, sort_children) for child in children]
    return doc


def snapshot_document(tree: FolderTree, sort_children: bool = True) -> dict:
    """The snapshot as a plain dict in canonical key order.

    With ``sort_children`` (the default) sibling lists are emitted in name
    order, so equal trees serialize byte-identically; reduced views pass
    False to keep their importance ordering.
    """
    # json recurses once per level; allow for unusually deep trees.
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20_000))
    try:
        return {
            "format_version": FORMAT_VERSION,
            "source": tree.source,
            "scanned_at": format_timestamp(tree.scanned_at),
            "root": _node_document(tree.root, sort_children),
        }
    finally:
        sys.setrecursionlimit(limit)


def document_bytes(doc: dict) -> bytes:
    """Canonical encoding: compact single line, UTF-8, one trailing LF."""
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20_000))
    try:
        return json.dumps(doc, ensure_ascii=False, separators=(",", ":")).encode() + b"\n"
    finally:
        sys.setrecursionlimit(limit)


def snapshot_bytes(tree: FolderTree) -> bytes:
    return document_bytes(snapshot_document(tree))


def _expect(condition: bool, message: str, element: str) -> None:
    if not condition:
        raise SnapshotParseError(message, element)


def _parse_count(obj: dict, key: str, element: str) -> int:
    value = obj.get(key)
    _expect(isinstance(value, int) and not isinstance(value, bool), f"{key} must be an integer", f"{element}.{key}")
    _expect(value >= 0, f"{key} must be >= 0", f"{element}.{key}")
    return value


def _parse_node(obj: object, element: str, require_unique_names: bool) -> FolderNode:
    _expect(isinstance(obj, dict), "node must be an object", element)
    assert isinstance(obj, dict)
    name = obj.get("name")
    _expect(isinstance(name, str) and name != "", "name must be a non-empty string", f"{element}.name")
    direct = _parse_count(obj, "direct_files", element)
    accessible = _parse_count(obj, "accessible_files", element)
    modified = parse_timestamp(obj.get("modified_at"), f"{element}.modified_at")
    ancestors_raw = obj.get("collapsed_ancestors", [])
    _expect(
        isinstance(ancestors_raw, list) and all(isinstance(a, str) for a in ancestors_raw),
        "collapsed_ancestors must be a list of strings",
        f"{element}.collapsed_ancestors",
    )
    children_raw = obj.get("children")
    _expect(isinstance(children_raw, list), "children must be a list", f"{element}.children")
    assert isinstance(children_raw, list)
    children = tuple(
        _parse_node(child, f"{element}.children[{i}]", require_unique_names)
        for i, child in enumerate(children_raw)
    )
    if require_unique_names:
        seen: set[str] = set()
        for i, child in enumerate(children):
            _expect(
                child.name not in seen,
                f"duplicate sibling name {child.name!r}",
                f"{element}.children[{i}].name",
            )
            seen.add(child.name)
    total = direct + sum(child.accessible_files for child in children)
    _expect(
        accessible == total,
        f"accessible_files {accessible} != direct_files + children total {total}",
        f"{element}.accessible_files",
    )
    return FolderNode(
        name=name,
        direct_files=direct,
        accessible_files=accessible,
        modified_at=modified,
        children=children,
        collapsed_ancestors=tuple(ancestors_raw),
    )


def parse_snapshot(data: bytes | str) -> FolderTree:
    """Parse and validate a snapshot document (aggregates are checked, not
    recomputed). Unknown keys are ignored; reduced-view documents, which carry
    a ``reduction`` block and may hold duplicate sibling labels, parse too.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20_000))
    try:
        try:
            raw = json.loads(data)
        except json.JSONDecodeError as exc:
            raise SnapshotParseError(f"invalid JSON: {exc}") from exc
        _expect(isinstance(raw, dict), "document must be an object", "")
        version = raw.get("format_version")
        if version != FORMAT_VERSION:
            raise UnsupportedVersionError(version)
        source = raw.get("source")
        _expect(isinstance(source, str), "source must be a string", "source")
        scanned_at = parse_timestamp(raw.get("scanned_at"), "scanned_at")
        unique_names = "reduction" not in raw
        root = _parse_node(raw.get("root"), "root", unique_names)
        return FolderTree(root=root, source=source, scanned_at=scanned_at)
    finally:
        sys.setrecursionlimit(limit)


def atomic_write(destination: str | os.PathLike, payload: bytes) -> None:
    """Write via a temp file in the same directory, then rename."""
    dest = Path(destination)
    tmp = dest.with_name(dest.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, dest)


def write_snapshot(tree: FolderTree, destination: str | os.PathLike) -> None:
    atomic_write(destination, snapshot_bytes(tree))


def read_snapshot(source: str | os.PathLike) -> FolderTree:
    return parse_snapshot(Path(source).read_bytes())
