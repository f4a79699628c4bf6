"""Pruning, compression, the combined reduction pipeline, and profiling."""

from __future__ import annotations

import json
import math
import random
import subprocess
import sys

import numpy as np
import pytest

from treekit._flat import flatten
from treekit.ingest import SynthParams, generate_synthetic, parse_snapshot
from treekit.kernels import numba_impl, numpy_impl
from treekit.reduction import (
    check_strength,
    compress,
    parse_grid_spec,
    pick_tradeoff,
    profile,
    prune,
    reduce,
    reduced_bytes,
    reduced_document,
    sweep,
)
from treekit.tree import FolderNode, iter_nodes, iter_paths, metrics, recompute_aggregates

from conftest import (
    TS,
    all_parent_arrays,
    check_aggregates,
    node,
    prune_oracle,
    rand_tree,
    tree_from_parents,
    tree_of,
)


class TestPrune:
    def test_zero_strength_is_identity(self):
        tree = rand_tree(seed=1, size=40)
        result = prune(tree, 0.0)
        assert result.tree is tree
        assert (result.pruned_files, result.pruned_folders) == (0, 0)

    def test_full_strength_keeps_only_root(self):
        tree = rand_tree(seed=2, size=40)
        result = prune(tree, 1.0)
        assert result.tree.root.children == ()
        assert result.tree.root.accessible_files == tree.root.direct_files
        assert result.pruned_files == tree.root.accessible_files - tree.root.direct_files

    def test_three_node_chain_at_half(self):
        # accessibles {A: 10, B: 8}; theta = 8 keeps A only
        tree = tree_of(node("root", 0, node("A", 2, node("B", 8))))
        result = prune(tree, 0.5)
        assert [n.name for n in iter_nodes(result.tree.root)] == ["root", "A"]
        assert result.tree.root.accessible_files == 2
        assert (result.pruned_files, result.pruned_folders) == (8, 1)

    def test_ties_at_threshold_are_pruned(self):
        tree = tree_of(node("r", 0, node("a", 5), node("b", 5), node("c", 9)))
        result = prune(tree, 0.5)  # theta = 5
        assert {c.name for c in result.tree.root.children} == {"c"}

    def test_single_node_any_strength(self):
        tree = tree_of(node("solo", 4))
        assert prune(tree, 0.7).tree is tree

    def test_conservation(self):
        tree = rand_tree(seed=3, size=300)
        total = tree.root.accessible_files
        for t in (0.1, 0.33, 0.5, 0.77, 1.0):
            result = prune(tree, t)
            assert result.tree.root.accessible_files + result.pruned_files == total
            check_aggregates(result.tree.root)

    def test_ancestor_closure(self):
        tree = rand_tree(seed=4, size=200)
        kept = {id(n) for n in iter_nodes(prune(tree, 0.4).tree.root)}
        # every kept node's path exists in the output: structure is a tree by
        # construction; check against the original by name-paths
        kept_paths = {p for p, _ in iter_paths(prune(tree, 0.4).tree)}
        for path in kept_paths:
            parent = path.rsplit("/", 1)[0]
            assert parent in kept_paths or "/" not in path

    @pytest.mark.parametrize("seed", range(30))
    def test_matches_brute_force_oracle_random(self, seed):
        rng = random.Random(seed)
        tree = rand_tree(seed=seed + 500, size=rng.randrange(2, 14))
        t = rng.random()
        result = prune(tree, t)
        expected_tree, expected_files, expected_folders = prune_oracle(tree, t)
        assert result.tree.root == expected_tree.root
        assert result.pruned_files == expected_files
        assert result.pruned_folders == expected_folders

    def test_matches_oracle_on_exhaustive_shapes(self):
        rng = random.Random(99)
        cases = 0
        for n in range(1, 6):
            for parents in all_parent_arrays(n):
                directs = [rng.randrange(6) for _ in range(n)]
                tree = tree_from_parents(parents, directs)
                for t in (0.25, 0.6, 1.0):
                    got = prune(tree, t)
                    want_tree, want_files, _ = prune_oracle(tree, t)
                    assert got.tree.root == want_tree.root
                    assert got.pruned_files == want_files
                    cases += 1
        assert cases >= 100

    def test_bad_strength_rejected(self):
        tree = rand_tree(seed=5, size=5)
        for bad in (-0.1, 1.5, float("nan")):
            with pytest.raises(ValueError):
                prune(tree, bad)


class TestCompress:
    def test_zero_strength_is_identity(self):
        tree = rand_tree(seed=6, size=30)
        result = compress(tree, 0.0)
        assert result.tree is tree
        assert result.collapsed_folders == 0

    def test_pass_through_collapses_at_any_positive_strength(self):
        tree = tree_of(node("root", 0, node("P", 0, node("C", 10))))
        result = compress(tree, 0.01)
        root = result.tree.root
        assert [c.name for c in root.children] == ["C"]
        assert root.children[0].collapsed_ancestors == ("P",)
        assert root.accessible_files == 10
        assert result.collapsed_folders == 1

    def test_dominant_child_collapse_relocates_direct_files(self):
        tree = tree_of(node("root", 0, node("P", 10, node("C1", 90))))
        result = compress(tree, 0.2)  # 90/100 = 0.9 >= 0.8
        root = result.tree.root
        assert result.collapsed_folders == 1
        assert root.direct_files == 10
        assert [c.name for c in root.children] == ["C1"]
        assert root.accessible_files == 100
        check_aggregates(root)

    def test_below_threshold_no_change(self):
        tree = tree_of(node("root", 0, node("P", 10, node("C1", 90))))
        result = compress(tree, 0.05)  # 0.9 < 0.95
        assert result.collapsed_folders == 0
        assert result.tree is tree

    def test_promoted_children_keep_sibling_position(self):
        # P sits between a and z; its children splice into P's slot
        tree = tree_of(
            node("root", 0, node("a", 1), node("P", 0, node("p1", 5), node("p2", 4)), node("z", 1))
        )
        result = compress(tree, 0.9)
        assert [c.name for c in result.tree.root.children] == ["a", "p1", "p2", "z"]

    def test_chain_collapses_as_a_unit_with_ancestor_trail(self):
        tree = tree_of(node("root", 0, node("a", 0, node("b", 0, node("c", 0, node("leaf", 9))))))
        result = compress(tree, 0.5)
        root = result.tree.root
        assert result.collapsed_folders == 3
        assert [c.name for c in root.children] == ["leaf"]
        assert root.children[0].collapsed_ancestors == ("a", "b", "c")
        assert root.accessible_files == 9

    def test_existing_trail_is_prepended(self):
        promoted = FolderNode("x", 4, 4, TS, (), ("older",))
        mid = FolderNode("mid", 0, 4, TS, (promoted,))
        tree = tree_of(FolderNode("root", 0, 4, TS, (mid,)))
        result = compress(tree, 0.8)
        assert result.tree.root.children[0].collapsed_ancestors == ("mid", "older")

    def test_root_total_preserved_and_aggregates_consistent(self):
        for seed in range(12):
            tree = rand_tree(seed=seed + 40, size=150)
            for t in (0.2, 0.5, 0.9, 1.0):
                result = compress(tree, t)
                assert result.tree.root.accessible_files == tree.root.accessible_files
                check_aggregates(result.tree.root)
                before = sum(1 for _ in iter_nodes(tree.root))
                after = sum(1 for _ in iter_nodes(result.tree.root))
                assert before - after == result.collapsed_folders

    def test_dominance_judged_on_input_aggregates(self):
        # a: 100 files, child b: 90, grandchild c: 81. At threshold 0.85 both
        # ratios are 0.9; a is judged against b's input-tree 90 even though b
        # itself collapses (a re-judged against the promoted c would be 0.81).
        tree = tree_of(node("root", 0, node("a", 10, node("b", 9, node("c", 81)))))
        result = compress(tree, 0.15)
        names = {n.name for n in iter_nodes(result.tree.root)}
        assert "b" not in names
        assert "a" not in names
        assert names == {"root", "c"}
        assert result.tree.root.accessible_files == 100
        assert result.tree.root.direct_files == 19  # a's and b's files moved up
        check_aggregates(result.tree.root)

    def test_duplicate_names_after_promotion_are_tolerated(self):
        tree = tree_of(node("root", 0, node("P", 0, node("data", 9)), node("data", 1)))
        result = compress(tree, 0.5)
        names = [c.name for c in result.tree.root.children]
        assert names == ["data", "data"]
        check_aggregates(result.tree.root)


class TestReduce:
    def test_identity_endpoint(self):
        tree = rand_tree(seed=7, size=120)
        result = reduce(tree, 0.0)
        assert result.tree is tree
        assert result.metrics.retained_file_fraction == 1.0
        assert (result.pruned_folder_count, result.collapsed_folder_count) == (0, 0)

    def test_terminal_endpoint(self):
        tree = rand_tree(seed=8, size=120)
        result = reduce(tree, 1.0)
        assert result.metrics.folder_count == 1
        assert result.tree.root.children == ()

    def test_single_node_any_strength(self):
        tree = tree_of(node("solo", 2))
        for t in (0.0, 0.4, 1.0):
            result = reduce(tree, t)
            assert result.metrics.folder_count == 1
            assert result.tree.root.name == "solo"

    def test_folder_count_invariant(self):
        tree = rand_tree(seed=9, size=333)
        original = metrics(tree).folder_count
        for t in (0.0, 0.2, 0.5, 0.8, 1.0):
            r = reduce(tree, t)
            assert (
                r.pruned_folder_count + r.collapsed_folder_count + r.metrics.folder_count
                == original
            )

    def test_output_sorted_by_importance_with_valid_aggregates(self):
        tree = rand_tree(seed=10, size=250)
        r = reduce(tree, 0.35)
        check_aggregates(r.tree.root)
        for n in iter_nodes(r.tree.root):
            keys = [(-c.accessible_files, c.name) for c in n.children]
            assert keys == sorted(keys)

    def test_metrics_match_materialized_tree(self):
        tree = rand_tree(seed=11, size=240)
        for t in (0.15, 0.45, 0.85):
            r = reduce(tree, t)
            m = metrics(r.tree, original_total=tree.root.accessible_files or None)
            assert r.metrics.folder_count == m.folder_count
            assert r.metrics.max_depth == m.max_depth
            assert r.metrics.total_files == m.total_files

    def test_depth_never_grows(self):
        for seed in range(8):
            tree = rand_tree(seed=seed + 70, size=200)
            base = metrics(tree).max_depth
            for t in (0.1, 0.5, 0.9, 1.0):
                assert reduce(tree, t).metrics.max_depth <= base

    def test_monotone_folder_count_over_grid(self):
        grid = [i / 100 for i in range(101)]
        for seed in (0, 1, 2):
            tree = generate_synthetic(SynthParams(target_folder_count=800, seed=seed))
            counts = [row.folder_count for row in sweep(tree, grid)]
            assert all(a >= b for a, b in zip(counts, counts[1:]))

    def test_separate_strength_overrides(self):
        tree = rand_tree(seed=12, size=100)
        only_prune = reduce(tree, 0.5, compress_strength=0.0)
        assert only_prune.collapsed_folder_count == 0
        assert only_prune.pruned_folder_count > 0
        only_compress = reduce(tree, 0.5, prune_strength=0.0)
        assert only_compress.pruned_folder_count == 0
        assert only_compress.metrics.total_files == tree.root.accessible_files

    def test_dominated_intermediates_vanish(self):
        # A research-archive style hierarchy; dominated intermediate levels
        # must disappear while the heavy subtree surfaces near the root.
        tree = tree_of(
            node(
                "RA work", 0,
                node("administrative (SIN, etc)", 7),
                node("Data", 5),
                node(
                    "dormant", 4,
                    node("C# work", 115),
                    node("FQRSC online hierarchy browser", 8),
                    node("insight dev proposal", 2),
                    node("lattice visualization", 128),
                    node("mapping science using LCSH", 82),
                    node("McGill Internal SSHRC Social Netw...", 5),
                    node("McGill Observatory", 9),
                    node(
                        "NSERC Improving retrieval of unst...", 0,
                        node("java project", 13),
                        node(
                            "tree simplification", 1,
                            node("data", 7),
                            node("received data backups", 205),
                            node("src", 31),
                            node("src backups", 69),
                            node("Tree testing", 250),
                        ),
                    ),
                ),
            )
        )
        assert tree.root.accessible_files == 941
        sim = next(n for n in iter_nodes(tree.root) if n.name == "tree simplification")
        assert sim.accessible_files == 563

        r = reduce(tree, 0.5)
        names = {n.name for n in iter_nodes(r.tree.root)}
        assert "dormant" not in names
        assert "NSERC Improving retrieval of unst..." not in names
        top = [c.name for c in r.tree.root.children]
        assert top[0] == "tree simplification"
        promoted = r.tree.root.children[0]
        assert promoted.collapsed_ancestors == (
            "dormant", "NSERC Improving retrieval of unst...",
        )
        assert [c.name for c in promoted.children] == [
            "Tree testing", "received data backups", "src backups",
        ]
        assert r.metrics.folder_count == 8
        assert r.metrics.total_files == 854


class TestProfileAndSweep:
    def test_grid_zero_row_is_original(self):
        tree = rand_tree(seed=13, size=64)
        prof = profile(tree, [0.0])
        row = prof.rows[0]
        m = metrics(tree)
        assert (row.folder_count, row.max_depth) == (m.folder_count, m.max_depth)
        assert row.retained_file_fraction == 1.0

    def test_grid_one_row_is_single_folder(self):
        tree = rand_tree(seed=14, size=64)
        assert profile(tree, [1.0]).rows[0].folder_count == 1

    def test_rows_match_reduce(self):
        tree = rand_tree(seed=15, size=150)
        grid = [0.0, 0.25, 0.5, 0.75, 1.0]
        prof = profile(tree, grid)
        for row in prof.rows:
            r = reduce(tree, row.t)
            assert row.folder_count == r.metrics.folder_count
            assert row.max_depth == r.metrics.max_depth
            assert row.retained_file_fraction == pytest.approx(
                r.metrics.retained_file_fraction
            )

    @pytest.mark.parametrize("bad", [[], [0.5, 0.5], [0.8, 0.2], [-0.1, 0.5], [0.5, 1.2]])
    def test_bad_grids_rejected(self, bad):
        tree = rand_tree(seed=16, size=10)
        with pytest.raises(ValueError):
            profile(tree, bad)

    def test_pick_tradeoff_respects_fraction_floor(self):
        tree = generate_synthetic(SynthParams(target_folder_count=2000, seed=5))
        prof = profile(tree, [i / 20 for i in range(21)])
        best = pick_tradeoff(prof, min_retained=0.5)
        assert best is not None
        assert best.retained_file_fraction >= 0.5
        for row in prof.rows:
            if row.retained_file_fraction >= 0.5:
                assert best.folder_count <= row.folder_count

    def test_parse_grid_spec(self):
        assert parse_grid_spec("0:0.25:1") == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert parse_grid_spec("0:1:1") == [0.0, 1.0]
        assert len(parse_grid_spec("0:0.01:1")) == 101
        for bad in ("", "1:2", "0:0:1", "0.5:0.1:0.2", "a:b:c", "0:0.1:2"):
            with pytest.raises(ValueError):
                parse_grid_spec(bad)


class TestReducedDocument:
    def test_document_shape_and_parse_back(self):
        tree = rand_tree(seed=17, size=90)
        r = reduce(tree, 0.4)
        doc = reduced_document(r)
        assert list(doc) == ["format_version", "source", "scanned_at", "reduction", "root"]
        assert doc["reduction"]["t"] == 0.4
        assert doc["reduction"]["pruned_folder_count"] == r.pruned_folder_count
        assert doc["reduction"]["collapsed_folder_count"] == r.collapsed_folder_count
        parsed = parse_snapshot(reduced_bytes(r))
        assert parsed.root == r.tree.root

    def test_children_keep_importance_order_in_document(self):
        tree = rand_tree(seed=18, size=120)
        doc = reduced_document(reduce(tree, 0.3))

        def walk(obj):
            accs = [c["accessible_files"] for c in obj["children"]]
            assert accs == sorted(accs, reverse=True) or accs == sorted(
                accs, key=lambda a: -a
            )
            for c in obj["children"]:
                walk(c)

        walk(doc["root"])

    def test_zero_strength_root_section_byte_identical(self):
        from treekit.ingest import document_bytes, snapshot_document

        tree = generate_synthetic(SynthParams(target_folder_count=150, seed=6))
        r = reduce(tree, 0.0)
        snap_root = document_bytes(snapshot_document(tree)["root"])
        reduced_root = document_bytes(reduced_document(r)["root"])
        assert snap_root == reduced_root


class TestKernelBackends:
    @pytest.mark.parametrize("impl", [numpy_impl, numba_impl], ids=["numpy", "numba"])
    def test_backends_agree_with_each_other(self, impl):
        other = numpy_impl if impl is numba_impl else numba_impl
        for seed in range(10):
            tree = rand_tree(seed=seed + 200, size=180)
            flat = flatten(tree.root)
            for t in (0.05, 0.3, 0.6, 0.95):
                alive = flat.accessible > np.sort(flat.accessible[1:])[
                    max(math.ceil(t * (flat.n - 1)), 1) - 1
                ]
                alive[0] = True
                a = impl.recompute_accessible(flat.parent, flat.levels, flat.direct, alive)
                b = other.recompute_accessible(flat.parent, flat.levels, flat.direct, alive)
                assert np.array_equal(a, b)
                ca = impl.collapse_mask(flat.parent, flat.levels, flat.accessible, alive, t)
                cb = other.collapse_mask(flat.parent, flat.levels, flat.accessible, alive, t)
                assert np.array_equal(ca, cb)
                assert impl.survivor_stats(flat.parent, flat.levels, alive, ca) == \
                    other.survivor_stats(flat.parent, flat.levels, alive, cb)

    def test_env_flag_selects_numpy_backend(self):
        code = (
            "import os; os.environ['TREEKIT_NO_NUMBA'] = '1'; "
            "from treekit import kernels; print(kernels.backend_name())"
        )
        out = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, check=True
        )
        assert out.stdout.strip() == "numpy"

    def test_default_backend_is_numba(self):
        code = (
            "import os; os.environ.pop('TREEKIT_NO_NUMBA', None); "
            "from treekit import kernels; print(kernels.backend_name())"
        )
        out = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, check=True
        )
        assert out.stdout.strip() == "numba"

    def test_full_pipeline_identical_under_numpy_backend(self):
        tree = generate_synthetic(SynthParams(target_folder_count=400, seed=21))
        r = reduce(tree, 0.42)
        code = (
            "import os; os.environ['TREEKIT_NO_NUMBA'] = '1';\n"
            "from treekit.ingest import SynthParams, generate_synthetic\n"
            "from treekit.reduction import reduce, reduced_bytes\n"
            "import sys\n"
            "tree = generate_synthetic(SynthParams(target_folder_count=400, seed=21))\n"
            "sys.stdout.buffer.write(reduced_bytes(reduce(tree, 0.42)))\n"
        )
        out = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, check=True
        )
        assert out.stdout == reduced_bytes(r)
