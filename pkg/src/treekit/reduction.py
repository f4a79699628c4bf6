"""Tree reduction: quantile-threshold pruning, dominance-ratio compression,
the single-strength pipeline combining them, and strength-sweep profiling.

Strength t runs from 0 (no modification) to 1 (only the fullest folder, the
root, remains). Both algorithms run on a flattened array view of the tree so
a 101-point sweep over a 10k-folder hierarchy stays interactive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels
from ._flat import FlatTree, flatten_cached, materialize
from .ingest import atomic_write, document_bytes, snapshot_document
from .tree import FolderTree, TreeMetrics, metrics

__all__ = [
    "PruneResult",
    "CompressResult",
    "ReducedTree",
    "ProfileRow",
    "ReductionProfile",
    "SweepRow",
    "prune",
    "compress",
    "reduce",
    "sweep",
    "profile",
    "pick_tradeoff",
    "parse_grid_spec",
    "check_strength",
    "reduced_document",
    "reduced_bytes",
    "write_reduced",
]


class PruneResult(NamedTuple):
    tree: FolderTree
    pruned_files: int
    pruned_folders: int


class CompressResult(NamedTuple):
    tree: FolderTree
    collapsed_folders: int


@dataclass(frozen=True)
class ReducedTree:
    """Output of the full pipeline, with metrics against the original tree."""

    tree: FolderTree
    metrics: TreeMetrics
    strength: float
    pruned_folder_count: int
    collapsed_folder_count: int


@dataclass(frozen=True)
class ProfileRow:
    t: float
    folder_count: int
    max_depth: int
    retained_file_fraction: float


@dataclass(frozen=True)
class ReductionProfile:
    rows: tuple[ProfileRow, ...]


@dataclass(frozen=True)
class SweepRow:
    """One strength-sweep sample with exact integer bookkeeping."""

    t: float
    folder_count: int
    max_depth: int
    retained_files: int
    pruned_files: int
    pruned_folder_count: int
    collapsed_folder_count: int


def check_strength(t: float, name: str = "t") -> float:
    t = float(t)
    if math.isnan(t) or not 0.0 <= t <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {t!r}")
    return t


def _prune_threshold(sorted_nonroot: np.ndarray, t: float) -> int:
    """The accessible-files quantile below-or-at which non-root folders die."""
    k = math.ceil(t * sorted_nonroot.shape[0])
    return int(sorted_nonroot[max(k, 1) - 1])


def _alive_mask(flat: FlatTree, t: float) -> np.ndarray:
    # Monotone aggregates make {accessible > theta} ancestor-closed.
    theta = _prune_threshold(flat.sorted_nonroot_accessible, t)
    alive = flat.accessible > theta
    alive[0] = True
    return alive


def prune(tree: FolderTree, t: float) -> PruneResult:
    """Remove the file-light folders.

    theta is the accessible-files value at the t-quantile of all non-root
    folders of the input; exactly the non-root folders with accessible > theta
    survive (ties die, so t = 1 keeps only the root). Aggregates are
    recomputed over the survivors.
    """
    t = check_strength(t)
    if t == 0.0:
        return PruneResult(tree, 0, 0)
    flat = flatten_cached(tree.root)
    if flat.n == 1:
        return PruneResult(tree, 0, 0)
    alive = _alive_mask(flat, t)
    accessible = kernels.recompute_accessible(flat.parent, flat.levels, flat.direct, alive)
    none_collapsed = np.zeros(flat.n, dtype=np.bool_)
    root = materialize(flat, alive, none_collapsed, accessible)
    new_tree = FolderTree(root=root, source=tree.source, scanned_at=tree.scanned_at)
    pruned_files = int(flat.accessible[0]) - int(accessible[0])
    pruned_folders = flat.n - int(np.count_nonzero(alive))
    return PruneResult(new_tree, pruned_files, pruned_folders)


def compress(tree: FolderTree, t: float) -> CompressResult:
    """Collapse folders dominated by one heavy child.

    A non-root folder with children collapses once its heaviest child's
    accessible count reaches (1 - t) of its own, judged on the input tree's
    aggregates; the children (heavy one and siblings alike) move up one level
    and the folder's direct files relocate to its parent, conserving the
    total exactly. Chains of dominated folders vanish as a unit, promoting
    the survivors several levels at once.
    """
    t = check_strength(t)
    if t == 0.0:
        return CompressResult(tree, 0)
    flat = flatten_cached(tree.root)
    alive = np.ones(flat.n, dtype=np.bool_)
    collapsed = kernels.collapse_mask(flat.parent, flat.levels, flat.accessible, alive, t)
    count = int(np.count_nonzero(collapsed))
    if count == 0:
        return CompressResult(tree, 0)
    root = materialize(flat, alive, collapsed, flat.accessible)
    return CompressResult(
        FolderTree(root=root, source=tree.source, scanned_at=tree.scanned_at), count
    )


def reduce(
    tree: FolderTree,
    t: float,
    prune_strength: float | None = None,
    compress_strength: float | None = None,
) -> ReducedTree:
    """Prune, then compress the survivors, then order siblings by importance.

    One strength drives both algorithms; the per-algorithm overrides exist as
    an API hook. t = 0 returns the input tree untouched (no re-sorting);
    t = 1 leaves exactly one folder.
    """
    t = check_strength(t)
    tp = t if prune_strength is None else check_strength(prune_strength, "prune_strength")
    tc = t if compress_strength is None else check_strength(compress_strength, "compress_strength")
    if tp == 0.0 and tc == 0.0:
        return ReducedTree(tree, metrics(tree), t, 0, 0)

    flat = flatten_cached(tree.root)
    n = flat.n
    original_total = int(flat.accessible[0])
    if tp > 0.0 and n > 1:
        alive = _alive_mask(flat, tp)
        accessible = kernels.recompute_accessible(flat.parent, flat.levels, flat.direct, alive)
    else:
        alive = np.ones(n, dtype=np.bool_)
        accessible = flat.accessible
    if tc > 0.0:
        # Dominance ratios come from the pipeline input's aggregates, like the
        # prune threshold; judging them on post-prune totals lets a stronger
        # prune disable collapses and breaks display monotonicity.
        collapsed = kernels.collapse_mask(flat.parent, flat.levels, flat.accessible, alive, tc)
    else:
        collapsed = np.zeros(n, dtype=np.bool_)
    folder_count, max_depth = kernels.survivor_stats(flat.parent, flat.levels, alive, collapsed)
    root = materialize(flat, alive, collapsed, accessible, importance_order=True)
    new_total = int(accessible[0])
    fraction = new_total / original_total if original_total else 1.0
    return ReducedTree(
        tree=FolderTree(root=root, source=tree.source, scanned_at=tree.scanned_at),
        metrics=TreeMetrics(folder_count, max_depth, new_total, fraction),
        strength=t,
        pruned_folder_count=n - int(np.count_nonzero(alive)),
        collapsed_folder_count=int(np.count_nonzero(collapsed)),
    )


def parse_grid_spec(spec: str) -> list[float]:
    """Expand a "start:step:end" spec into an inclusive ascending grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be 'start:step:end', got {spec!r}")
    try:
        start, step, end = (float(p) for p in parts)
    except ValueError:
        raise ValueError(f"grid must be numeric 'start:step:end', got {spec!r}") from None
    if not 0.0 <= start <= end <= 1.0:
        raise ValueError(f"grid range must satisfy 0 <= start <= end <= 1, got {spec!r}")
    if step <= 0.0:
        raise ValueError(f"grid step must be positive, got {spec!r}")
    count = int(math.floor((end - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def _check_grid(grid: Sequence[float]) -> list[float]:
    values = [check_strength(t, "grid value") for t in grid]
    if not values:
        raise ValueError("grid must not be empty")
    for a, b in zip(values, values[1:]):
        if b <= a:
            raise ValueError("grid values must be strictly ascending")
    return values


def sweep(tree: FolderTree, grid: Iterable[float]) -> list[SweepRow]:
    """Evaluate the pipeline over a strength grid without building trees."""
    values = _check_grid(list(grid))
    flat = flatten_cached(tree.root)
    n = flat.n
    original_total = int(flat.accessible[0])
    original_depth = int(flat.depth.max())
    rows: list[SweepRow] = []
    for t in values:
        if t == 0.0:
            rows.append(SweepRow(t, n, original_depth, original_total, 0, 0, 0))
            continue
        if n > 1:
            alive = _alive_mask(flat, t)
            accessible = kernels.recompute_accessible(
                flat.parent, flat.levels, flat.direct, alive
            )
        else:
            alive = np.ones(n, dtype=np.bool_)
            accessible = flat.accessible
        # Same ratio basis as reduce(): the input tree's own aggregates.
        collapsed = kernels.collapse_mask(flat.parent, flat.levels, flat.accessible, alive, t)
        folder_count, max_depth = kernels.survivor_stats(
            flat.parent, flat.levels, alive, collapsed
        )
        new_total = int(accessible[0])
        rows.append(
            SweepRow(
                t=t,
                folder_count=folder_count,
                max_depth=max_depth,
                retained_files=new_total,
                pruned_files=original_total - new_total,
                pruned_folder_count=n - int(np.count_nonzero(alive)),
                collapsed_folder_count=int(np.count_nonzero(collapsed)),
            )
        )
    return rows


def profile(tree: FolderTree, grid: Iterable[float]) -> ReductionProfile:
    """Metrics of reduce() at every grid point, for trade-off hunting."""
    original_total = tree.root.accessible_files
    rows = tuple(
        ProfileRow(
            t=row.t,
            folder_count=row.folder_count,
            max_depth=row.max_depth,
            retained_file_fraction=(
                row.retained_files / original_total if original_total else 1.0
            ),
        )
        for row in sweep(tree, grid)
    )
    return ReductionProfile(rows)


def pick_tradeoff(
    prof: ReductionProfile, min_retained: float = 0.5
) -> ProfileRow | None:
    """The strongest reduction that still retains ``min_retained`` of the files."""
    best: ProfileRow | None = None
    for row in prof.rows:
        if row.retained_file_fraction >= min_retained:
            if best is None or row.folder_count < best.folder_count:
                best = row
    return best


def reduced_document(reduced: ReducedTree) -> dict:
    """Snapshot-format document plus the reduction block; children keep the
    importance ordering produced by reduce()."""
    base = snapshot_document(reduced.tree, sort_children=False)
    return {
        "format_version": base["format_version"],
        "source": base["source"],
        "scanned_at": base["scanned_at"],
        "reduction": {
            "t": reduced.strength,
            "pruned_folder_count": reduced.pruned_folder_count,
            "collapsed_folder_count": reduced.collapsed_folder_count,
            "retained_file_fraction": reduced.metrics.retained_file_fraction,
        },
        "root": base["root"],
    }


def reduced_bytes(reduced: ReducedTree) -> bytes:
    return document_bytes(reduced_document(reduced))


def write_reduced(reduced: ReducedTree, destination) -> None:
    atomic_write(destination, reduced_bytes(reduced))
