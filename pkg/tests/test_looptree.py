"""Loop graphs: cycle structure, contraction, naive cross-checks."""
from collections import deque

import numpy as np
import pytest

from dissectree._graph import bfs_distances, bit_diameter, bit_distance_matrix
from dissectree.looptree import loop_graph, loopbar_graph
from dissectree.plane_tree import (PlaneTree, TreeSampler,
                                   enumerate_no_unary_trees)


def naive_loop_edges(tree):
    """Dict-and-set reference construction of the loop edge set."""
    edges = set()
    for u in range(tree.n):
        cs = list(tree.children(u))
        if not cs:
            continue
        cycle = [u] + cs + [u]
        for a, b in zip(cycle, cycle[1:]):
            if a != b:
                edges.add((min(a, b), max(a, b)))
    return edges


def naive_all_distances(n, edges):
    adj = {v: [] for v in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    out = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        out[s, s] = 0
        q = deque([s])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if out[s, y] < 0:
                    out[s, y] = out[s, x] + 1
                    q.append(y)
    return out


def naive_contraction(tree):
    """Merge each internal vertex with its last child by label chasing."""
    label = list(range(tree.n))

    def find(x):
        while label[x] != x:
            x = label[x]
        return x

    for u in range(tree.n):
        cs = list(tree.children(u))
        if cs:
            label[find(cs[-1])] = find(u)
    groups = {}
    comp = []
    for v in range(tree.n):
        r = find(v)
        comp.append(groups.setdefault(r, len(groups)))
    edges = set()
    for a, b in naive_loop_edges(tree):
        ca, cb = comp[a], comp[b]
        if ca != cb:
            edges.add((min(ca, cb), max(ca, cb)))
    return len(groups), edges, comp


class TestHandCases:
    def test_cherry_is_a_triangle(self):
        g = loop_graph(PlaneTree([2, 0, 0]))
        assert g.n == 3
        assert bit_diameter(g) == 1
        assert sorted(g.neighbors(0).tolist()) == [1, 2]

    def test_unary_edge_collapses_parallel_pair(self):
        g = loop_graph(PlaneTree([1, 0]))
        assert g.n == 2
        assert g.neighbors(0).tolist() == [1]
        assert bit_diameter(g) == 1

    def test_star_is_a_cycle(self):
        g = loop_graph(PlaneTree([4, 0, 0, 0, 0]))
        assert bit_diameter(g) == 2  # five-cycle
        assert all(len(g.neighbors(v)) == 2 for v in range(5))

    def test_caterpillar(self):
        t = PlaneTree([2, 2, 0, 0, 0])
        g = loop_graph(t)
        m = bit_distance_matrix(g)
        assert m[4, 2] == 2
        assert bit_diameter(g) == 2

    def test_cherry_contraction(self):
        g, comp = loopbar_graph(PlaneTree([2, 0, 0]))
        assert g.n == 2
        assert comp[0] == comp[2] != comp[1]
        assert bit_diameter(g) == 1

    def test_caterpillar_contraction(self):
        g, comp = loopbar_graph(PlaneTree([2, 2, 0, 0, 0]))
        assert g.n == 3
        assert comp[0] == comp[4]
        assert comp[1] == comp[3]
        assert bit_diameter(g) == 2

    def test_single_vertex_rejected(self):
        with pytest.raises(ValueError):
            loop_graph(PlaneTree([0]))
        with pytest.raises(ValueError):
            loopbar_graph(PlaneTree([0]))


class TestAgainstNaiveConstruction:
    def test_loop_distances_exhaustive(self):
        for m in range(2, 7):
            for t in enumerate_no_unary_trees(m):
                g = loop_graph(t)
                want = naive_all_distances(t.n, naive_loop_edges(t))
                assert np.array_equal(bit_distance_matrix(g), want)

    def test_loop_distances_sampled(self, tri, uniform, geometric, rng):
        for mu in (tri, uniform, geometric):
            s = TreeSampler(mu, rng)
            for t in s.sample_vertices(41, want=8):
                g = loop_graph(t)
                want = naive_all_distances(t.n, naive_loop_edges(t))
                assert np.array_equal(bit_distance_matrix(g), want)

    def test_contraction_exhaustive(self):
        for m in range(2, 7):
            for t in enumerate_no_unary_trees(m):
                g, comp = loopbar_graph(t)
                n_want, edges_want, comp_want = naive_contraction(t)
                assert g.n == n_want
                # partitions agree up to relabeling
                pairs = {(comp[v], comp_want[v]) for v in range(t.n)}
                assert len({a for a, _ in pairs}) == len(pairs)
                assert len({b for _, b in pairs}) == len(pairs)
                want = naive_all_distances(n_want, edges_want)
                got = bit_distance_matrix(g)
                for x in range(t.n):
                    for y in range(t.n):
                        assert got[comp[x], comp[y]] == \
                            want[comp_want[x], comp_want[y]]

    def test_contraction_sampled(self, uniform, geometric, rng):
        for mu in (uniform, geometric):
            s = TreeSampler(mu, rng)
            for t in s.sample_vertices(35, want=6):
                g, comp = loopbar_graph(t)
                n_want, edges_want, comp_want = naive_contraction(t)
                assert g.n == n_want
                assert bit_diameter(g) == int(
                    naive_all_distances(n_want, edges_want).max())


class TestInvariants:
    def test_component_count_is_leaf_like(self, uniform, rng):
        # one union per internal vertex leaves n - internal components
        s = TreeSampler(uniform, rng)
        for t in s.sample_vertices(30, want=10):
            g, comp = loopbar_graph(t)
            internal = int(np.count_nonzero(t.degrees))
            assert g.n == t.n - internal
            assert comp.min() == 0 and comp.max() == g.n - 1

    def test_contraction_shrinks_distances(self, uniform, rng):
        s = TreeSampler(uniform, rng)
        for t in s.sample_vertices(30, want=5):
            loop = bit_distance_matrix(loop_graph(t))
            bar_g, comp = loopbar_graph(t)
            bar = bit_distance_matrix(bar_g)
            for u in range(0, t.n, 3):
                for v in range(0, t.n, 3):
                    assert bar[comp[u], comp[v]] <= loop[u, v]

    def test_contracted_diameter_never_larger(self, tri, uniform, rng):
        for mu in (tri, uniform):
            s = TreeSampler(mu, rng)
            for t in s.sample_leaves(25, want=10):
                assert bit_diameter(loopbar_graph(t)[0]) <= \
                    bit_diameter(loop_graph(t))

    def test_graphs_are_connected(self, uniform, rng):
        s = TreeSampler(uniform, rng)
        for t in s.sample_leaves(20, want=5):
            assert bfs_distances(loop_graph(t), 0).min() >= 0
            assert bfs_distances(loopbar_graph(t)[0], 0).min() >= 0
