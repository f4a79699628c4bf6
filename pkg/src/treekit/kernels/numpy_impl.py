"""Pure-numpy kernel backend: level-sliced sweeps over the preorder arrays.

``levels`` groups node indices by depth; prune masks never change a node's
depth, so the grouping is computed once per tree and reused across a sweep.
"""

from __future__ import annotations

import numpy as np


def recompute_accessible(parent, levels, direct, alive):
    acc = np.where(alive, direct, 0).astype(np.int64)
    for level in reversed(levels[1:]):
        idx = level[alive[level]]
        if idx.size:
            np.add.at(acc, parent[idx], acc[idx])
    return acc


def collapse_mask(parent, levels, accessible, alive, t):
    n = parent.shape[0]
    collapsed = np.zeros(n, dtype=np.bool_)
    heaviest = np.zeros(n, dtype=np.int64)
    has_child = np.zeros(n, dtype=np.bool_)
    threshold = 1.0 - t
    for level in reversed(levels[1:]):
        idx = level[alive[level]]
        if not idx.size:
            continue
        acc = accessible[idx]
        collapsed[idx] = (
            has_child[idx]
            & (acc > 0)
            & (heaviest[idx].astype(np.float64) >= threshold * acc.astype(np.float64))
        )
        np.maximum.at(heaviest, parent[idx], acc)
        has_child[parent[idx]] = True
    return collapsed


def survivor_stats(parent, levels, alive, collapsed):
    n = parent.shape[0]
    depth = np.zeros(n, dtype=np.int64)
    for level in levels[1:]:
        idx = level[alive[level]]
        if not idx.size:
            continue
        p = parent[idx]
        depth[idx] = depth[p] + (~collapsed[p])
    survivors = alive & ~collapsed
    count = int(np.count_nonzero(survivors))
    max_depth = int(depth[survivors].max()) if count else 0
    return count, max_depth
