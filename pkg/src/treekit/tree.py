"""Immutable folder-tree model: per-folder file counts, recursive aggregates,
and the browsing metrics shared by every other module.

Trees can be thousands of levels deep in principle, so every traversal here is
iterative (no Python recursion).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Iterator

__all__ = [
    "FolderNode",
    "FolderTree",
    "TreeMetrics",
    "recompute_aggregates",
    "metrics",
    "sort_siblings_by_importance",
    "iter_nodes",
    "iter_paths",
]


@dataclass(frozen=True, eq=False)
class FolderNode:
    """One folder: direct file count, recursive accessible count, mtime, children.

    ``collapsed_ancestors`` names compression-removed ancestors, most distant
    first; it is empty in unreduced trees.
    """

    name: str
    direct_files: int
    accessible_files: int
    modified_at: datetime
    children: tuple["FolderNode", ...] = ()
    collapsed_ancestors: tuple[str, ...] = ()

    def __eq__(self, other: object) -> bool:
        if other is self:
            return True
        if not isinstance(other, FolderNode):
            return NotImplemented
        # Iterative: structural equality must survive very deep chains.
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if (
                a.name != b.name
                or a.direct_files != b.direct_files
                or a.accessible_files != b.accessible_files
                or a.modified_at != b.modified_at
                or a.collapsed_ancestors != b.collapsed_ancestors
                or len(a.children) != len(b.children)
            ):
                return False
            stack.extend(zip(a.children, b.children))
        return True


@dataclass(frozen=True)
class FolderTree:
    """A snapshot of a hierarchy: the root node plus provenance."""

    root: FolderNode
    source: str
    scanned_at: datetime


@dataclass(frozen=True)
class TreeMetrics:
    folder_count: int
    max_depth: int
    total_files: int
    retained_file_fraction: float


def utc_second(dt: datetime) -> datetime:
    """Normalize a timestamp to UTC with seconds precision."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def iter_nodes(root: FolderNode) -> Iterator[FolderNode]:
    """Yield every node of the subtree in preorder."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def iter_paths(tree: FolderTree) -> Iterator[tuple[str, FolderNode]]:
    """Yield (path, node) in preorder; the root's path is its own name."""
    stack = [(tree.root.name, tree.root)]
    while stack:
        path, node = stack.pop()
        yield path, node
        for child in reversed(node.children):
            stack.append((path + "/" + child.name, child))


def _preorder_index(root: FolderNode) -> tuple[list[FolderNode], list[int]]:
    """Preorder node list plus parent indices (-1 for the root)."""
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
    return nodes, parents


def _rebuild(
    nodes: list[FolderNode],
    parents: list[int],
    make_node,
) -> FolderNode:
    """Rebuild a tree bottom-up; ``make_node(i, children)`` produces node i."""
    n = len(nodes)
    child_idx: list[list[int]] = [[] for _ in range(n)]
    for i in range(1, n):
        child_idx[parents[i]].append(i)
    built: list[FolderNode | None] = [None] * n
    for i in range(n - 1, -1, -1):
        built[i] = make_node(i, tuple(built[j] for j in child_idx[i]))
    return built[0]  # type: ignore[return-value]


def recompute_aggregates(tree: FolderTree) -> FolderTree:
    """Return a tree whose accessible_files equal direct_files plus the sum of
    each child's accessible_files, at every node. All other fields untouched.
    """
    nodes, parents = _preorder_index(tree.root)
    totals = [node.direct_files for node in nodes]
    for i in range(len(nodes) - 1, 0, -1):
        totals[parents[i]] += totals[i]

    def make(i: int, children: tuple[FolderNode, ...]) -> FolderNode:
        return replace(nodes[i], accessible_files=totals[i], children=children)

    return replace(tree, root=_rebuild(nodes, parents, make))


def metrics(tree: FolderTree, original_total: int | None = None) -> TreeMetrics:
    """Folder count, max downward depth (root = 0), total files, and the
    retained-file fraction relative to ``original_total`` (1.0 when absent).
    """
    if original_total is not None and original_total <= 0:
        raise ValueError(f"original_total must be positive, got {original_total}")
    count = 0
    max_depth = 0
    stack: list[tuple[FolderNode, int]] = [(tree.root, 0)]
    while stack:
        node, depth = stack.pop()
        count += 1
        if depth > max_depth:
            max_depth = depth
        for child in node.children:
            stack.append((child, depth + 1))
    total = tree.root.accessible_files
    fraction = 1.0 if original_total is None else total / original_total
    return TreeMetrics(count, max_depth, total, fraction)


def sort_siblings_by_importance(tree: FolderTree) -> FolderTree:
    """Order every sibling list by accessible_files descending, ties by name
    ascending. Stable and idempotent.
    """
    nodes, parents = _preorder_index(tree.root)

    def make(i: int, children: tuple[FolderNode, ...]) -> FolderNode:
        ordered = tuple(
            sorted(children, key=lambda c: (-c.accessible_files, c.name))
        )
        return replace(nodes[i], children=ordered)

    return replace(tree, root=_rebuild(nodes, parents, make))
