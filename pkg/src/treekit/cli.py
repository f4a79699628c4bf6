"""Batch entry points: scan, synth, reduce, profile, annotate, serve.

Standard output carries machine-readable summaries only; diagnostics go to
standard error. Exit codes: 0 success, 1 input/IO error, 2 domain conflict
(relevance requested under an excluded ancestor).
"""

from __future__ import annotations

import argparse
import socket
import sys
import threading
import webbrowser
from pathlib import Path

from . import annotation as ann
from . import ingest, reduction
from .tree import FolderTree, metrics

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFLICT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _summary_line(tree: FolderTree) -> str:
    m = metrics(tree)
    return f"folders={m.folder_count} files={m.total_files} depth={m.max_depth}"


def _build_parser() -> _Parser:
    parser = _Parser(prog="treekit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="snapshot a directory hierarchy")
    p_scan.add_argument("path")
    p_scan.add_argument("--out", required=True, help="snapshot file to write")
    p_scan.add_argument("--follow-symlinks", action="store_true")
    p_scan.add_argument("--max-depth", type=int, default=None)
    p_scan.add_argument(
        "--exclude", action="append", default=[], metavar="NAME",
        help="skip entries with this name (repeatable)",
    )

    p_synth = sub.add_parser("synth", help="generate a seeded synthetic snapshot")
    p_synth.add_argument("--folders", type=int, required=True)
    p_synth.add_argument("--max-children", type=int, default=8)
    p_synth.add_argument("--depth-bias", type=float, default=0.3)
    p_synth.add_argument("--alpha", type=float, default=1.1, help="Pareto tail index")
    p_synth.add_argument("--scale", type=float, default=1.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True)

    p_reduce = sub.add_parser("reduce", help="prune + compress a snapshot")
    p_reduce.add_argument("snapshot")
    p_reduce.add_argument("--t", required=True, help="strength in [0, 1]")
    p_reduce.add_argument("--out", required=True)

    p_profile = sub.add_parser("profile", help="sweep strengths, emit CSV")
    p_profile.add_argument("snapshot")
    p_profile.add_argument("--grid", required=True, help="start:step:end (inclusive)")
    p_profile.add_argument("--out", default=None, help="CSV file (default: stdout)")

    p_ann = sub.add_parser("annotate", help="edit or query an annotation file")
    p_ann.add_argument("snapshot")
    p_ann.add_argument("annotations", help="annotation file (created if missing)")
    ann_sub = p_ann.add_subparsers(dest="action", required=True)
    p_set = ann_sub.add_parser("set", help="mark a folder")
    p_set.add_argument("path")
    p_set.add_argument("--kind", required=True, choices=(ann.RELEVANT, ann.EXCLUDED))
    p_set.add_argument("--context", action="append", default=[], metavar="TAG")
    p_set.add_argument("--note", default=None)
    p_clear = ann_sub.add_parser("clear", help="remove a mark")
    p_clear.add_argument("path")
    ann_sub.add_parser("show", help="print the canonical document")
    ann_sub.add_parser("coverage", help="file counts per effective status")

    p_serve = sub.add_parser("serve", help="serve the HTTP API and web UI")
    p_serve.add_argument(
        "--snapshot", action="append", default=[], metavar="FILE",
        help="preload a snapshot (repeatable)",
    )
    p_serve.add_argument("--port", type=int, default=8008)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--open", action="store_true", help="open a browser tab")
    p_serve.add_argument("--ui-dir", default=None, help="static asset directory")

    return parser


def _cmd_scan(args: argparse.Namespace) -> int:
    opts = ingest.ScanOptions(
        follow_symlinks=args.follow_symlinks,
        max_depth_limit=args.max_depth,
        excluded_names=frozenset(args.exclude),
    )
    result = ingest.scan(args.path, opts)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    ingest.write_snapshot(result.tree, args.out)
    print(_summary_line(result.tree))
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    params = ingest.SynthParams(
        target_folder_count=args.folders,
        max_children=args.max_children,
        depth_bias=args.depth_bias,
        pareto_alpha=args.alpha,
        scale=args.scale,
        seed=args.seed,
    )
    tree = ingest.generate_synthetic(params)
    ingest.write_snapshot(tree, args.out)
    print(_summary_line(tree))
    return EXIT_OK


def _cmd_reduce(args: argparse.Namespace) -> int:
    # Reject a bad strength before touching the snapshot.
    t = reduction.check_strength(float(args.t))
    tree = ingest.read_snapshot(args.snapshot)
    reduced = reduction.reduce(tree, t)
    reduction.write_reduced(reduced, args.out)
    print(_summary_line(reduced.tree))
    return EXIT_OK


def _cmd_profile(args: argparse.Namespace) -> int:
    grid = reduction.parse_grid_spec(args.grid)
    tree = ingest.read_snapshot(args.snapshot)
    prof = reduction.profile(tree, grid)
    lines = ["t,folder_count,max_depth,retained_file_fraction"]
    for row in prof.rows:
        lines.append(
            f"{row.t},{row.folder_count},{row.max_depth},{row.retained_file_fraction}"
        )
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def _cmd_annotate(args: argparse.Namespace) -> int:
    tree = ingest.read_snapshot(args.snapshot)
    ann_path = Path(args.annotations)
    if ann_path.exists():
        store = ann.load_annotations(ann_path)
        if store.collection_root != tree.root.name:
            print(
                f"error: annotation file is for {store.collection_root!r}, "
                f"snapshot root is {tree.root.name!r}",
                file=sys.stderr,
            )
            return EXIT_ERROR
    else:
        store = ann.AnnotationStore.empty(tree.root.name)

    if args.action == "set":
        status = ann.AnnotationStatus(
            kind=args.kind, contexts=frozenset(args.context), note=args.note
        )
        store = ann.set_annotation(store, tree, args.path, status)
        ann.save_annotations(store, ann_path)
    elif args.action == "clear":
        store = ann.clear_annotation(store, args.path)
        ann.save_annotations(store, ann_path)
    elif args.action == "show":
        sys.stdout.buffer.write(ann.annotations_bytes(store))
    elif args.action == "coverage":
        summary = ann.coverage_summary(store, tree)
        print(
            f"relevant={summary.relevant_files} "
            f"excluded={summary.excluded_files} "
            f"unmarked={summary.unmarked_files}"
        )
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    # Imported lazily; uvicorn is not needed by the batch commands.
    import uvicorn

    from .service import CollectionRegistry, create_app

    registry = CollectionRegistry()
    for snapshot_file in args.snapshot:
        tree = ingest.read_snapshot(snapshot_file)
        collection = registry.add(tree)
        # uvicorn.run blocks until shutdown; flush so piped callers see the ids
        print(f"id={collection.id} snapshot={snapshot_file}", flush=True)

    ui_dir = args.ui_dir
    if ui_dir is None:
        candidate = Path("frontend/dist")
        if candidate.is_dir():
            ui_dir = candidate
    app = create_app(registry, ui_dir=ui_dir)

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        probe.close()

    if args.open:
        url = f"http://{args.host}:{args.port}/"
        ids = registry.ids()
        if ids:
            url += f"?collection={ids[0]}"
        threading.Timer(0.8, webbrowser.open, args=(url,)).start()
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


_COMMANDS = {
    "scan": _cmd_scan,
    "synth": _cmd_synth,
    "reduce": _cmd_reduce,
    "profile": _cmd_profile,
    "annotate": _cmd_annotate,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ann.ExclusionConflictError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFLICT
    except (
        ingest.ScanError,
        ingest.SnapshotParseError,
        ann.AnnotationError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
