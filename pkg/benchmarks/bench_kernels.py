"""Compare the numba and numpy kernel backends on reduction sweeps.

Usage:
    python benchmarks/bench_kernels.py [--folders 10000] [--points 101] [--repeat 3]

Runs the same strength sweep through both backends (plus the end-to-end
reduce() with the default backend) and prints a timing table. The numba
numbers exclude JIT compilation (one warm-up sweep runs first).
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from treekit._flat import flatten
from treekit.ingest import SynthParams, generate_synthetic
from treekit.kernels import backend_name, numba_impl, numpy_impl
from treekit.reduction import reduce as reduce_tree


def sweep_with(impl, flat, grid) -> int:
    checksum = 0
    sorted_nonroot = np.sort(flat.accessible[1:])
    for t in grid:
        if t == 0.0 or flat.n == 1:
            checksum += flat.n
            continue
        k = max(math.ceil(t * sorted_nonroot.shape[0]), 1)
        theta = int(sorted_nonroot[k - 1])
        alive = flat.accessible > theta
        alive[0] = True
        accessible = impl.recompute_accessible(flat.parent, flat.levels, flat.direct, alive)
        collapsed = impl.collapse_mask(flat.parent, flat.levels, flat.accessible, alive, t)
        count, depth = impl.survivor_stats(flat.parent, flat.levels, alive, collapsed)
        checksum += count + depth + int(accessible[0])
    return checksum


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--folders", type=int, default=10_000)
    parser.add_argument("--points", type=int, default=101)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    tree = generate_synthetic(
        SynthParams(target_folder_count=args.folders, pareto_alpha=1.1, seed=args.seed)
    )
    flat = flatten(tree.root)
    grid = [i / (args.points - 1) for i in range(args.points)]

    backends = [("numpy", numpy_impl), ("numba", numba_impl)]
    print(f"tree: {args.folders} folders, {tree.root.accessible_files} files; "
          f"grid: {args.points} points; default backend: {backend_name()}")

    reference = None
    for name, impl in backends:
        sweep_with(impl, flat, grid)  # warm-up (JIT for numba, caches for numpy)
        best = math.inf
        checksum = 0
        for _ in range(args.repeat):
            start = time.perf_counter()
            checksum = sweep_with(impl, flat, grid)
            best = min(best, time.perf_counter() - start)
        if reference is None:
            reference = checksum
        agreement = "ok" if checksum == reference else "MISMATCH"
        print(f"  {name:>6}: {best * 1000:8.1f} ms/sweep "
              f"({best / args.points * 1e6:7.1f} us/point)  results: {agreement}")

    start = time.perf_counter()
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        reduce_tree(tree, t)
    elapsed = time.perf_counter() - start
    print(f"  end-to-end reduce() x5 (materialized, {backend_name()}): {elapsed * 1000:.1f} ms")


if __name__ == "__main__":
    main()
