"""Plane trees: structure, enumeration, weights, and the conditioned sampler.

The block-stream sampler is held to *exact* agreement with the plain
rejection loop: same offspring stream, same accepted trees, same attempt
counts, regardless of window sizes.
"""
import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from dissectree._graph import bfs_distances
from dissectree.plane_tree import (ATTEMPT_CAP_DEFAULT, CapExhausted,
                                   PlaneTree, PlantedTree, TreeSampler,
                                   deserialize_tree, enumerate_no_unary_trees,
                                   gw_log_weight, gw_weight, plant,
                                   restricted_tree, sample_conditioned_leaves,
                                   sample_conditioned_naive,
                                   sample_conditioned_vertices, sample_gw,
                                   serialize_tree, unplant)

CHERRY = [2, 0, 0]
NO_UNARY_COUNTS = {1: 1, 2: 1, 3: 3, 4: 11, 5: 45, 6: 197, 7: 903, 8: 4279}
CATALAN = [1, 1, 2, 5, 14, 42, 132]


class TestStructure:
    def test_cherry(self):
        t = PlaneTree(CHERRY)
        assert t.n == 3
        assert t.leaf_count == 2
        assert t.leaves.tolist() == [1, 2]
        assert t.parent.tolist() == [-1, 0, 0]
        assert t.heights.tolist() == [0, 1, 1]
        assert t.height == 1
        assert t.children(0).tolist() == [1, 2]
        assert t.child_rank.tolist() == [0, 0, 1]
        assert t.ancestors(2) == [0, 2]
        assert t.distance(1, 2) == 2
        assert t.diameter() == 2

    def test_caterpillar(self):
        t = PlaneTree([2, 2, 0, 0, 0])
        assert t.parent.tolist() == [-1, 0, 1, 1, 0]
        assert t.heights.tolist() == [0, 1, 2, 2, 1]
        assert t.leaves.tolist() == [2, 3, 4]
        assert t.children(1).tolist() == [2, 3]
        assert t.distance(2, 4) == 3
        assert t.diameter() == 3

    def test_single_vertex(self):
        t = PlaneTree([0])
        assert t.n == 1
        assert t.leaf_count == 1
        assert t.height == 0
        assert t.diameter() == 0

    def test_unary_vertices_are_legal_trees(self):
        t = PlaneTree([1, 1, 0])
        assert t.heights.tolist() == [0, 1, 2]

    @pytest.mark.parametrize("bad", [[2, 0], [0, 0], [2, 0, 0, 0],
                                     [3, 0, 0], [2, -1, 0], []])
    def test_invalid_degree_sequences(self, bad):
        with pytest.raises(ValueError):
            PlaneTree(bad)

    def test_distance_matches_bfs(self):
        for t in enumerate_no_unary_trees(5):
            g = t.graph()
            for u in range(t.n):
                d = bfs_distances(g, u)
                for v in range(t.n):
                    assert t.distance(u, v) == d[v]


class TestPlanting:
    def test_planted_cherry(self):
        p = plant(PlaneTree(CHERRY))
        assert p.degrees.tolist() == [1, 2, 0, 0]
        assert p.planted_leaves.tolist() == [0, 2, 3]
        assert p.leaf_splits(1) == [(0, 1)]
        assert p.leaf_splits(2) == [(1, 0)]

    def test_roundtrip(self):
        for t in enumerate_no_unary_trees(5):
            assert unplant(plant(t)) == t

    def test_planted_heights_shift_by_one(self):
        t = PlaneTree([3, 0, 2, 0, 0, 0])
        p = plant(t)
        assert p.heights[1:].tolist() == (t.heights + 1).tolist()

    def test_rejects_wide_root(self):
        with pytest.raises(ValueError):
            PlantedTree(CHERRY)

    def test_leaf_split_bounds(self):
        p = plant(PlaneTree(CHERRY))
        with pytest.raises(ValueError):
            p.leaf_splits(0)
        with pytest.raises(ValueError):
            p.leaf_splits(3)


class TestSpineSplits:
    def test_root_and_depth_one(self):
        t = PlaneTree(CHERRY)
        assert t.spine_splits(0) == []
        # depth-1 vertices have no non-root strict ancestor
        assert t.spine_splits(1) == []

    def test_ternary_root_middle_child(self):
        p = plant(PlaneTree([3, 0, 0, 0]))
        assert p.leaf_splits(2) == [(1, 1)]

    def test_split_counts_and_sums(self):
        for t in enumerate_no_unary_trees(5):
            deg = t.degrees
            for v in range(1, t.n):
                splits = t.spine_splits(v)
                path = t.ancestors(v)
                assert len(splits) == t.heights[v] - 1
                for (g, d), anc in zip(splits, path[1:-1]):
                    assert g + d + 1 == deg[anc]
                    assert g >= 0 and d >= 0


class TestRestriction:
    def test_identity_when_tree_is_a_spine(self):
        t = PlaneTree([3, 2, 0, 0, 0, 0])
        rt, idx = restricted_tree(t, 2)
        assert rt == t
        assert idx == 2

    def test_preserves_path_geometry(self):
        for t in enumerate_no_unary_trees(6):
            for v in range(t.n):
                rt, idx = restricted_tree(t, v)
                assert rt.heights[idx] == t.heights[v]
                assert rt.spine_splits(idx) == t.spine_splits(v)
                # off-path subtrees collapse, so nothing outgrows the original
                assert rt.n <= t.n


class TestEnumeration:
    @pytest.mark.parametrize("m,count", sorted(NO_UNARY_COUNTS.items()))
    def test_counts(self, m, count):
        assert len(enumerate_no_unary_trees(m)) == count

    def test_trees_are_valid_distinct_no_unary(self):
        for m in range(1, 7):
            trees = enumerate_no_unary_trees(m)
            assert len(set(trees)) == len(trees)
            for t in trees:
                PlaneTree(t.degrees)  # re-validate the walk
                assert t.leaf_count == m
                assert not np.any(t.degrees == 1)

    def test_bounds(self):
        with pytest.raises(ValueError):
            enumerate_no_unary_trees(0)
        with pytest.raises(ValueError):
            enumerate_no_unary_trees(13)


class TestSerialization:
    def test_roundtrip(self):
        for t in enumerate_no_unary_trees(6):
            assert deserialize_tree(serialize_tree(t)) == t

    def test_rejects_bad_text(self):
        with pytest.raises(ValueError):
            deserialize_tree("")
        with pytest.raises(ValueError):
            deserialize_tree("2 0")


class TestWeights:
    def test_hand_values(self, tri, quad):
        assert gw_weight(tri, PlaneTree([0])) == pytest.approx(0.5)
        assert gw_weight(tri, PlaneTree(CHERRY)) == pytest.approx(1.0 / 8.0)
        # degree 2 is outside the quadrangulation support
        assert gw_weight(quad, PlaneTree(CHERRY)) == 0.0
        assert gw_log_weight(quad, PlaneTree(CHERRY)) == -np.inf

    def test_leaf_count_law_is_catalan_for_binary(self, tri):
        # under the binary law, P(m leaves) = Cat(m-1) / 2^{2m-1}
        for m in range(1, 8):
            total = sum(gw_weight(tri, t) for t in enumerate_no_unary_trees(m))
            assert total == pytest.approx(CATALAN[m - 1] * 2.0 ** -(2 * m - 1),
                                          abs=1e-15)

    def test_uniform_law_weights_all_trees_equally(self, uniform):
        # the defining property of the uniform-dissection weights
        for m in range(2, 7):
            ws = [gw_weight(uniform, t) for t in enumerate_no_unary_trees(m)]
            assert max(ws) == pytest.approx(min(ws), rel=1e-12)
            assert min(ws) > 0.0


class TestUnconditionedSampler:
    def test_leaf_cap_one_keeps_half(self, tri, rng):
        hits = 0
        for _ in range(20_000):
            t = sample_gw(tri, rng, leaf_cap=1)
            if t is not None:
                assert t == PlaneTree([0])
                hits += 1
        assert hits / 20_000 == pytest.approx(0.5, abs=0.02)

    def test_cherry_frequency(self, tri, rng):
        cherry = PlaneTree(CHERRY)
        hits = 0
        for _ in range(40_000):
            t = sample_gw(tri, rng, leaf_cap=2)
            if t is not None and t == cherry:
                hits += 1
        assert hits / 40_000 == pytest.approx(1.0 / 8.0, abs=0.01)


def naive_batch(mu, seed, want, n_leaves=None, n_vertices=None):
    rng = np.random.default_rng(seed)
    trees, attempts = [], 0
    for _ in range(want):
        t, used = sample_conditioned_naive(mu, rng, n_leaves=n_leaves,
                                           n_vertices=n_vertices)
        trees.append(t)
        attempts += used
    return trees, attempts


class TestStreamSamplerExactness:
    @pytest.mark.parametrize("block,chunk", [(3, 2), (37, 16), (4096, 8192)])
    @pytest.mark.parametrize("target", [2, 5, 9])
    def test_leaves_match_naive_loop(self, tri, uniform, block, chunk, target):
        for mu in (tri, uniform):
            for seed in (0, 1):
                naive_trees, naive_attempts = naive_batch(
                    mu, seed, want=4, n_leaves=target)
                s = TreeSampler(mu, np.random.default_rng(seed),
                                block=block, chunk=chunk)
                stream_trees = s.sample_leaves(target, want=4)
                assert stream_trees == naive_trees
                assert s.attempts_total == naive_attempts

    @pytest.mark.parametrize("block,chunk", [(5, 3), (4096, 8192)])
    def test_vertices_match_naive_loop(self, tri, uniform, block, chunk):
        for mu, target in ((tri, 9), (uniform, 8)):
            for seed in (2, 3):
                naive_trees, naive_attempts = naive_batch(
                    mu, seed, want=4, n_vertices=target)
                s = TreeSampler(mu, np.random.default_rng(seed),
                                block=block, chunk=chunk)
                stream_trees = s.sample_vertices(target, want=4)
                assert stream_trees == naive_trees
                assert s.attempts_total == naive_attempts

    def test_probe_counts_match_naive_loop(self, tri):
        rng = np.random.default_rng(11)
        hits = 0
        for _ in range(500):
            t = sample_gw(tri, rng, leaf_cap=4)
            if t is not None and t.leaf_count == 4:
                hits += 1
        s = TreeSampler(tri, np.random.default_rng(11), block=64, chunk=32)
        assert s.probe_leaves(4, 500) == hits
        # the probe is a pure function of the seed
        s2 = TreeSampler(tri, np.random.default_rng(11), block=64, chunk=32)
        assert s2.probe_leaves(4, 500) == hits

    def test_naive_argument_validation(self, tri, rng):
        with pytest.raises(ValueError):
            sample_conditioned_naive(tri, rng)
        with pytest.raises(ValueError):
            sample_conditioned_naive(tri, rng, n_leaves=3, n_vertices=5)


class TestConditionedLaws:
    def test_two_leaves_is_always_the_cherry(self, tri, rng):
        s = TreeSampler(tri, rng)
        for t in s.sample_leaves(2, want=25):
            assert t == PlaneTree(CHERRY)

    def test_three_vertices_is_the_cherry(self, tri, rng):
        assert sample_conditioned_vertices(tri, 3, rng) == PlaneTree(CHERRY)

    def test_two_vertices_needs_a_unary_root(self, geometric, rng):
        assert sample_conditioned_vertices(geometric, 2, rng) == \
            PlaneTree([1, 0])

    def test_binary_three_leaf_shapes_equally_likely(self, tri):
        # keep only the two binary shapes; the ternary root has weight 0
        shapes = [t for t in enumerate_no_unary_trees(3)
                  if not np.any(t.degrees == 3)]
        assert len(shapes) == 2
        index = {t: i for i, t in enumerate(shapes)}
        s = TreeSampler(tri, np.random.default_rng(5))
        counts = np.zeros(2)
        for t in s.sample_leaves(3, want=2000):
            counts[index[t]] += 1
        p = scipy.stats.chisquare(counts).pvalue
        assert p > 0.01

    def test_four_leaf_trees_uniform_under_uniform_law(self, uniform):
        trees = enumerate_no_unary_trees(4)
        index = {t: i for i, t in enumerate(trees)}
        s = TreeSampler(uniform, np.random.default_rng(6))
        counts = np.zeros(len(trees))
        for t in s.sample_leaves(4, want=5500):
            counts[index[t]] += 1
        assert counts.min() > 0
        p = scipy.stats.chisquare(counts).pvalue
        assert p > 0.01

    def test_binary_vertex_counts_are_odd(self, tri, rng):
        s = TreeSampler(tri, rng)
        for t in s.sample_leaves(6, want=10):
            assert t.n == 11  # 2 * leaves - 1

    def test_module_level_wrappers(self, tri):
        t = sample_conditioned_leaves(tri, 5, np.random.default_rng(9))
        assert t.leaf_count == 5
        t = sample_conditioned_vertices(tri, 9, np.random.default_rng(9))
        assert t.n == 9


class TestCapExhaustion:
    def test_unreachable_vertex_parity(self, quad):
        # offspring support {0, 3} forces 1 mod 3 vertex counts; 30 never hits
        s = TreeSampler(quad, np.random.default_rng(0), block=256, chunk=128)
        with pytest.raises(CapExhausted) as info:
            s.sample_vertices(30, attempt_cap=200)
        assert info.value.attempts == 200

    def test_naive_cap(self, quad):
        rng = np.random.default_rng(0)
        with pytest.raises(CapExhausted) as info:
            sample_conditioned_naive(quad, rng, n_vertices=30, attempt_cap=50)
        assert info.value.attempts == 50

    def test_default_cap_is_large(self):
        assert ATTEMPT_CAP_DEFAULT == 100_000_000
