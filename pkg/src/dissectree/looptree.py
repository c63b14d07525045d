"""Loop graphs of plane trees and their contracted variants.

Every vertex u with children c_1..c_k contributes the cycle
u - c_1 - c_2 - ... - c_k - u (the root included), so sibling edges run
alongside the two parent edges.  A single child would make the two parent
edges a parallel pair; the graph is kept simple, collapsing them.

The contracted variant merges every vertex with its last child (union-find
over the (parent, last child) pairs), then drops self-loops and parallel
edges.  Distances in both graphs scale like the tree's own metric with
constants tied to the offspring law's variance and parity masses.
"""

from __future__ import annotations

import numpy as np

from ._graph import CSRGraph
from .plane_tree import PlaneTree


def _dedupe_edges(u: np.ndarray, v: np.ndarray, n: int,
                  ) -> tuple[np.ndarray, np.ndarray]:
    a = np.minimum(u, v)
    b = np.maximum(u, v)
    keep = a != b
    a, b = a[keep], b[keep]
    code = np.unique(a * np.int64(n) + b)
    return code // n, code % n


def _cycle_edges(tree: PlaneTree) -> tuple[np.ndarray, np.ndarray]:
    """Raw loop edges (with duplicates from single-child cycles)."""
    if tree._children is None:
        tree._fill_children()
    order, starts = tree._children
    par = tree.parent
    grp = par[order]
    internal = np.flatnonzero(tree.degrees > 0)
    first = order[starts[internal]]
    last = order[starts[internal + 1] - 1]
    sib_mask = grp[:-1] == grp[1:]
    su = order[:-1][sib_mask]
    sv = order[1:][sib_mask]
    u = np.concatenate((internal, su, last))
    v = np.concatenate((first, sv, internal))
    return u, v


def loop_graph(tree: PlaneTree) -> CSRGraph:
    """Cycle-per-vertex graph on the tree's own vertex set."""
    if tree.n == 1:
        raise ValueError("single-vertex tree has no loop graph")
    u, v = _dedupe_edges(*_cycle_edges(tree), tree.n)
    return CSRGraph(tree.n, np.concatenate((u, v)), np.concatenate((v, u)))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def loopbar_graph(tree: PlaneTree) -> tuple[CSRGraph, np.ndarray]:
    """Loop graph with every (vertex, last child) edge contracted.

    Returns the contracted graph and the component label of each original
    vertex, so measures on the tree push forward to the quotient.
    """
    if tree.n == 1:
        raise ValueError("single-vertex tree has no loop graph")
    if tree._children is None:
        tree._fill_children()
    order, starts = tree._children
    internal = np.flatnonzero(tree.degrees > 0)
    last = order[starts[internal + 1] - 1]
    uf = _UnionFind(tree.n)
    for p, c in zip(internal.tolist(), last.tolist()):
        uf.union(p, c)
    roots = np.array([uf.find(i) for i in range(tree.n)], dtype=np.int64)
    uniq, comp = np.unique(roots, return_inverse=True)
    m = len(uniq)
    u, v = _cycle_edges(tree)
    cu, cv = _dedupe_edges(comp[u], comp[v], m)
    if len(cu) == 0:
        raise ValueError("contraction left no edges")
    g = CSRGraph(m, np.concatenate((cu, cv)), np.concatenate((cv, cu)))
    return g, comp
