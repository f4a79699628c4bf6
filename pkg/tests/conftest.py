"""Shared fixtures: hand-buildable trees, an independent random-tree source,
and brute-force oracles the implementation under test never touches."""

from __future__ import annotations

import math
import random
from dataclasses import replace
from datetime import datetime, timedelta, timezone

import pytest

from treekit.tree import FolderNode, FolderTree, iter_nodes

TS = datetime(2020, 10, 12, tzinfo=timezone.utc)


def node(name: str, direct: int, *children: FolderNode, modified: datetime = TS) -> FolderNode:
    """Build a node with aggregates summed at construction (the definitional
    oracle: accessible = direct + children's accessible)."""
    acc = direct + sum(c.accessible_files for c in children)
    return FolderNode(name, direct, acc, modified, tuple(children))


def tree_of(root: FolderNode, source: str = "fixture") -> FolderTree:
    return FolderTree(root=root, source=source, scanned_at=TS)


def rand_tree(seed: int, size: int, max_direct: int = 20) -> FolderTree:
    """Random tree from the stdlib RNG; independent of the package's own
    synthetic generator. Child names are zero-padded so sibling order is
    already name-ascending."""
    rng = random.Random(seed)
    parents = [-1] + [rng.randrange(i) for i in range(1, size)]
    directs = [rng.choice((0, 0, rng.randrange(max_direct))) for _ in range(size)]
    mtimes = [TS - timedelta(seconds=rng.randrange(3_000_000)) for _ in range(size)]
    children: list[list[int]] = [[] for _ in range(size)]
    for i in range(1, size):
        children[parents[i]].append(i)
    built: list[FolderNode | None] = [None] * size
    for i in range(size - 1, -1, -1):
        built[i] = node(
            f"n{i:05d}" if i else "top",
            directs[i],
            *(built[j] for j in children[i]),
            modified=mtimes[i],
        )
    return tree_of(built[0], source="random")


# --- oracles -----------------------------------------------------------------


def subtree_file_count(root: FolderNode) -> int:
    """Exhaustive enumeration: sum of direct counts over the subtree."""
    total = 0
    stack = [root]
    while stack:
        n = stack.pop()
        total += n.direct_files
        stack.extend(n.children)
    return total


def check_aggregates(root: FolderNode) -> None:
    """Assert the aggregate identity at every node by full traversal."""
    stack = [root]
    while stack:
        n = stack.pop()
        assert n.accessible_files == n.direct_files + sum(
            c.accessible_files for c in n.children
        ), f"aggregate mismatch at {n.name!r}"
        assert n.accessible_files >= max(
            (c.accessible_files for c in n.children), default=0
        )
        stack.extend(n.children)


def prune_oracle(tree: FolderTree, t: float) -> tuple[FolderTree, int, int]:
    """Brute force: keep root plus non-root nodes with accessible > theta,
    recount bottom-up."""
    non_root = sorted(
        n.accessible_files for n in iter_nodes(tree.root) if n is not tree.root
    )
    if t == 0 or not non_root:
        return tree, 0, 0
    theta = non_root[max(math.ceil(t * len(non_root)), 1) - 1]

    def rebuild(n: FolderNode) -> FolderNode:
        kept = tuple(
            rebuild(c) for c in n.children if c.accessible_files > theta
        )
        acc = n.direct_files + sum(c.accessible_files for c in kept)
        return replace(n, accessible_files=acc, children=kept)

    new_root = rebuild(tree.root)
    before = sum(1 for _ in iter_nodes(tree.root))
    after = sum(1 for _ in iter_nodes(new_root))
    return (
        replace(tree, root=new_root),
        tree.root.accessible_files - new_root.accessible_files,
        before - after,
    )


def effective_oracle(store, tree: FolderTree, path: str):
    """Path-walk resolution: collect entries from the root down; the topmost
    exclusion wins, else the nearest entry, else unmarked."""
    segments = path.split("/")
    prefixes = ["/".join(segments[: i + 1]) for i in range(len(segments))]
    nearest = None
    for prefix in prefixes:
        entry = store.entries.get(prefix)
        if entry is None:
            continue
        if entry.kind == "excluded":
            return ("excluded", prefix)
        nearest = prefix
    if nearest is None:
        return ("unmarked", None)
    return ("relevant", nearest)


def random_store(tree, seed: int):
    """Arbitrary legal store over a tree's paths, including relevance
    shadowed below exclusions (legal at rest: exclusions may arrive after
    deeper relevance marks)."""
    from datetime import timedelta

    from treekit.annotation import AnnotationStatus, AnnotationStore, SoftwareNote
    from treekit.tree import iter_paths

    rng = random.Random(seed)
    entries = {}
    for path, _ in iter_paths(tree):
        roll = rng.random()
        if roll < 0.18:
            entries[path] = AnnotationStatus(
                "excluded", note="private" if rng.random() < 0.3 else None
            )
        elif roll < 0.45:
            tags = frozenset(
                rng.sample(
                    ["theme", "career", "family", "institution", "society"],
                    rng.randrange(3),
                )
            )
            entries[path] = AnnotationStatus("relevant", tags)
    notes = tuple(
        sorted(
            (
                SoftwareNote(
                    f"fmt{i}",
                    f"app-{rng.randrange(5)}",
                    None if rng.random() < 0.5 else f"v{i}",
                )
                for i in range(rng.randrange(4))
            ),
            key=SoftwareNote.sort_key,
        )
    )
    return AnnotationStore(
        collection_root=tree.root.name,
        entries=entries,
        software_notes=notes,
        modified_at=TS + timedelta(seconds=seed),
    )


def all_parent_arrays(n: int):
    """Every labeled rooted tree shape on n nodes, as parent index tuples
    (parent[i] < i); covers all shapes up to isomorphism and then some."""
    if n == 1:
        yield ()
        return
    import itertools

    yield from itertools.product(*(range(i) for i in range(1, n)))


def tree_from_parents(parents: tuple[int, ...], directs: list[int]) -> FolderTree:
    size = len(parents) + 1
    children: list[list[int]] = [[] for _ in range(size)]
    for i, p in enumerate(parents, start=1):
        children[p].append(i)
    built: list[FolderNode | None] = [None] * size
    for i in range(size - 1, -1, -1):
        built[i] = node(f"n{i}", directs[i], *(built[j] for j in children[i]))
    return tree_of(built[0], source="enumerated")


@pytest.fixture(scope="session")
def synth_corpus():
    """100 seeded generator trees, sizes spread linearly over 1..5000."""
    from treekit.ingest import SynthParams, generate_synthetic

    return [
        generate_synthetic(
            SynthParams(
                target_folder_count=max(1, (i * 5000) // 99), seed=1000 + i
            )
        )
        for i in range(100)
    ]
