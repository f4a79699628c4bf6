"""Array-backed view of a folder tree for the hot reduction kernels.

Nodes are laid out in preorder, so parent[i] < i for every non-root node and a
single reverse scan visits children before parents. A per-root cache lets a
strength sweep flatten each tree once.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from .tree import FolderNode


@dataclass
class FlatTree:
    names: list[str]
    direct: np.ndarray  # int64
    accessible: np.ndarray  # int64, aggregates as found in the source tree
    modified: list[datetime]
    ancestors: list[tuple[str, ...]]  # collapsed_ancestors per node
    parent: np.ndarray  # int64, -1 at the root
    depth: np.ndarray  # int64
    _levels: list[np.ndarray] | None = field(default=None, repr=False)
    _sorted_nonroot: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def levels(self) -> list[np.ndarray]:
        """Node indices grouped by depth, ascending."""
        if self._levels is None:
            order = np.argsort(self.depth, kind="stable")
            splits = np.searchsorted(self.depth[order], np.arange(1, int(self.depth.max()) + 1))
            self._levels = np.split(order, splits)
        return self._levels

    @property
    def sorted_nonroot_accessible(self) -> np.ndarray:
        """Ascending multiset of accessible_files over non-root folders."""
        if self._sorted_nonroot is None:
            self._sorted_nonroot = np.sort(self.accessible[1:])
        return self._sorted_nonroot


def flatten(root: FolderNode) -> FlatTree:
    names: list[str] = []
    direct: list[int] = []
    accessible: list[int] = []
    modified: list[datetime] = []
    ancestors: list[tuple[str, ...]] = []
    parent: list[int] = []
    depth: list[int] = []
    stack: list[tuple[FolderNode, int, int]] = [(root, -1, 0)]
    while stack:
        node, p, d = stack.pop()
        idx = len(names)
        names.append(node.name)
        direct.append(node.direct_files)
        accessible.append(node.accessible_files)
        modified.append(node.modified_at)
        ancestors.append(node.collapsed_ancestors)
        parent.append(p)
        depth.append(d)
        for child in reversed(node.children):
            stack.append((child, idx, d + 1))
    return FlatTree(
        names=names,
        direct=np.asarray(direct, dtype=np.int64),
        accessible=np.asarray(accessible, dtype=np.int64),
        modified=modified,
        ancestors=ancestors,
        parent=np.asarray(parent, dtype=np.int64),
        depth=np.asarray(depth, dtype=np.int64),
    )


_CACHE: dict[int, tuple[weakref.ref, FlatTree]] = {}


def flatten_cached(root: FolderNode) -> FlatTree:
    """Flatten with memoization keyed on root identity (trees are immutable)."""
    key = id(root)
    entry = _CACHE.get(key)
    if entry is not None and entry[0]() is root:
        return entry[1]
    flat = flatten(root)

    def _evict(_ref: weakref.ref, _key: int = key) -> None:
        _CACHE.pop(_key, None)

    _CACHE[key] = (weakref.ref(root, _evict), flat)
    return flat


def materialize(
    flat: FlatTree,
    alive: np.ndarray,
    collapsed: np.ndarray,
    accessible: np.ndarray,
    importance_order: bool = False,
) -> FolderNode:
    """Build the surviving tree for the given prune/collapse masks.

    Children of a collapsed folder reattach in its position; the collapsed
    folder's direct files flow to its nearest surviving ancestor, and each
    promoted child gains that chain of names in collapsed_ancestors
    (most distant first).
    """
    n = flat.n
    parent = flat.parent.tolist()
    alive_l = alive.tolist()
    coll_l = collapsed.tolist()
    names = flat.names
    direct_new = flat.direct.tolist()
    acc_l = accessible.tolist()

    # Nearest surviving ancestor, defined for every alive node.
    anc = [-1] * n
    for i in range(1, n):
        if alive_l[i]:
            p = parent[i]
            anc[i] = anc[p] if coll_l[p] else p

    child_idx: list[list[int]] = [[] for _ in range(n)]
    ancestors = list(flat.ancestors)
    for i in range(1, n):
        if not alive_l[i]:
            continue
        if coll_l[i]:
            # Flows only target survivors, so direct_new[i] is still original.
            direct_new[anc[i]] += direct_new[i]
            continue
        p = parent[i]
        if coll_l[p]:
            chain = []
            q = p
            while coll_l[q]:
                chain.append(names[q])
                q = parent[q]
            chain.reverse()
            ancestors[i] = tuple(chain) + flat.ancestors[i]
        child_idx[anc[i]].append(i)

    built: list[FolderNode | None] = [None] * n
    modified = flat.modified
    for i in range(n - 1, -1, -1):
        if not alive_l[i] or coll_l[i]:
            continue
        kids = child_idx[i]
        if importance_order:
            kids = sorted(kids, key=lambda j: (-acc_l[j], names[j]))
        built[i] = FolderNode(
            names[i],
            direct_new[i],
            acc_l[i],
            modified[i],
            tuple([built[j] for j in kids]),
            ancestors[i],
        )
    return built[0]  # type: ignore[return-value]
