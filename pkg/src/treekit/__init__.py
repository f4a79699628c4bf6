"""treekit: reduce, browse, and annotate large folder hierarchies.

Two tools behind one model: a strength-slider reduction of folder trees
(pruning file-light folders, collapsing pass-through levels) and an
annotation workflow for appraising collections before transfer or reuse.
"""

from .annotation import (
    AnnotationStatus,
    AnnotationStore,
    CoverageSummary,
    EffectiveStatus,
    ExclusionConflictError,
    SoftwareNote,
    clear_annotation,
    coverage_summary,
    effective_status,
    load_annotations,
    resolve_all,
    save_annotations,
    set_annotation,
    sort_folders,
)
from .ingest import (
    ScanOptions,
    ScanResult,
    SynthParams,
    generate_synthetic,
    read_snapshot,
    scan,
    write_snapshot,
)
from .reduction import (
    ReducedTree,
    ReductionProfile,
    compress,
    pick_tradeoff,
    profile,
    prune,
    reduce,
    sweep,
)
from .tree import (
    FolderNode,
    FolderTree,
    TreeMetrics,
    iter_nodes,
    iter_paths,
    metrics,
    recompute_aggregates,
    sort_siblings_by_importance,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationStatus",
    "AnnotationStore",
    "CoverageSummary",
    "EffectiveStatus",
    "ExclusionConflictError",
    "FolderNode",
    "FolderTree",
    "ReducedTree",
    "ReductionProfile",
    "ScanOptions",
    "ScanResult",
    "SoftwareNote",
    "SynthParams",
    "TreeMetrics",
    "clear_annotation",
    "compress",
    "coverage_summary",
    "effective_status",
    "generate_synthetic",
    "iter_nodes",
    "iter_paths",
    "load_annotations",
    "metrics",
    "pick_tradeoff",
    "profile",
    "prune",
    "read_snapshot",
    "recompute_aggregates",
    "reduce",
    "resolve_all",
    "save_annotations",
    "scan",
    "set_annotation",
    "sort_folders",
    "sort_siblings_by_importance",
    "sweep",
    "write_snapshot",
]
