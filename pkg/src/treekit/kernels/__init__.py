"""Hot kernels for the reduction pipeline.

Two interchangeable backends compute identical results:

* ``numba_impl`` — ``@njit`` scans over the preorder arrays (default),
* ``numpy_impl`` — vectorized level-by-level sweeps.

Set ``TREEKIT_NO_NUMBA=1`` before import to force the numpy path; it is also
used automatically when numba is unavailable. ``benchmarks/bench_kernels.py``
compares the two.
"""

from __future__ import annotations

import os

from . import numpy_impl

_flag = os.environ.get("TREEKIT_NO_NUMBA", "").strip().lower()
_want_numba = _flag not in {"1", "true", "yes", "on"}

if _want_numba:
    try:
        from . import numba_impl as _impl
    except ImportError:  # pragma: no cover - depends on the environment
        _impl = numpy_impl
else:
    _impl = numpy_impl


def backend_name() -> str:
    return "numba" if _impl is not numpy_impl else "numpy"


def recompute_accessible(parent, levels, direct, alive):
    """Subtree file totals over the alive nodes (dead subtrees contribute 0)."""
    return _impl.recompute_accessible(parent, levels, direct, alive)


def collapse_mask(parent, levels, accessible, alive, t):
    """Folders removed by compression at strength ``t``.

    A non-root alive folder with at least one alive child collapses when its
    heaviest child's accessible count reaches ``(1 - t)`` of its own.
    Dominance is judged on the ``accessible`` array as given (the pipeline
    input's aggregates), never on post-collapse re-aggregation, which keeps
    eligibility static per node and the reduced folder count monotone in t;
    one child-before-parent pass is therefore already the fixpoint.
    """
    return _impl.collapse_mask(parent, levels, accessible, alive, t)


def survivor_stats(parent, levels, alive, collapsed):
    """(folder_count, max_depth) of the tree left after prune + collapse."""
    return _impl.survivor_stats(parent, levels, alive, collapsed)
