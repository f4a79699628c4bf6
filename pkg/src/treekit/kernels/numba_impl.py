"""Numba kernel backend: single @njit scans over the preorder arrays.

Preorder guarantees parent[i] < i, so a reverse scan sees children before
parents and a forward scan sees parents first.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def _recompute_accessible(parent, direct, alive):
    n = parent.shape[0]
    acc = np.zeros(n, dtype=np.int64)
    for i in range(n):
        if alive[i]:
            acc[i] = direct[i]
    for i in range(n - 1, 0, -1):
        if alive[i]:
            acc[parent[i]] += acc[i]
    return acc


@numba.njit(cache=True)
def _collapse_mask(parent, accessible, alive, t):
    n = parent.shape[0]
    collapsed = np.zeros(n, dtype=np.bool_)
    heaviest = np.zeros(n, dtype=np.int64)
    has_child = np.zeros(n, dtype=np.bool_)
    threshold = 1.0 - t
    for i in range(n - 1, 0, -1):
        if not alive[i]:
            continue
        acc = accessible[i]
        collapsed[i] = (
            has_child[i]
            and acc > 0
            and np.float64(heaviest[i]) >= threshold * np.float64(acc)
        )
        p = parent[i]
        if acc > heaviest[p]:
            heaviest[p] = acc
        has_child[p] = True
    return collapsed


@numba.njit(cache=True)
def _survivor_stats(parent, alive, collapsed):
    n = parent.shape[0]
    depth = np.zeros(n, dtype=np.int64)
    count = 0
    max_depth = 0
    for i in range(n):
        if not alive[i]:
            continue
        if i > 0:
            p = parent[i]
            d = depth[p]
            if not collapsed[p]:
                d += 1
            depth[i] = d
        if not collapsed[i]:
            count += 1
            if depth[i] > max_depth:
                max_depth = depth[i]
    return count, max_depth


def recompute_accessible(parent, levels, direct, alive):
    return _recompute_accessible(parent, direct, alive)


def collapse_mask(parent, levels, accessible, alive, t):
    return _collapse_mask(parent, accessible, alive, t)


def survivor_stats(parent, levels, alive, collapsed):
    return _survivor_stats(parent, alive, collapsed)
