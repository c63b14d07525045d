"""Small vectorized graph kernels: BFS levels and bit-parallel all-pairs.

Graphs are undirected, given as directed edge arrays (both orientations).
The bit-parallel routines pack one bit per source into uint64 words and
propagate whole frontiers with bitwise/reduceat passes, which keeps
all-pairs distance extraction cheap enough to run inside sampling loops.
"""

from __future__ import annotations

import numpy as np


class CSRGraph:
    """Adjacency in CSR form plus the edge layout the BFS kernels want."""

    def __init__(self, n: int, src: np.ndarray, dst: np.ndarray):
        self.n = int(n)
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        order = np.argsort(dst, kind="stable")
        self.edge_dst_sorted_src = src[order]
        counts = np.bincount(dst, minlength=self.n)
        if self.n > 0 and counts.min() == 0:
            raise ValueError("graph has an isolated vertex")
        self.group_starts = np.zeros(self.n, dtype=np.int64)
        np.cumsum(counts[:-1], out=self.group_starts[1:])
        # CSR by source for frontier expansion
        order_s = np.argsort(src, kind="stable")
        self.adj_flat = dst[order_s]
        self.deg = np.bincount(src, minlength=self.n)
        self.adj_starts = np.zeros(self.n, dtype=np.int64)
        np.cumsum(self.deg[:-1], out=self.adj_starts[1:])

    def neighbors(self, v: int) -> np.ndarray:
        s = self.adj_starts[v]
        return self.adj_flat[s:s + self.deg[v]]


def _expand(g: CSRGraph, frontier: np.ndarray) -> np.ndarray:
    """All neighbors (with multiplicity) of the frontier vertex set."""
    counts = g.deg[frontier]
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    reps = np.repeat(g.adj_starts[frontier], counts)
    shift = np.arange(total, dtype=np.int64) - np.repeat(
        np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
    return g.adj_flat[reps + shift]


def bfs_distances(g: CSRGraph, source: int) -> np.ndarray:
    """Single-source BFS levels; -1 marks unreachable vertices."""
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while frontier.size:
        level += 1
        cand = _expand(g, frontier)
        cand = cand[dist[cand] < 0]
        if cand.size == 0:
            break
        frontier = np.unique(cand)
        dist[frontier] = level
    return dist


def eccentricity(g: CSRGraph, source: int) -> int:
    return int(bfs_distances(g, source).max())


def tree_diameter(g: CSRGraph) -> int:
    """Exact diameter of a tree by the double sweep."""
    d0 = bfs_distances(g, 0)
    far = int(np.argmax(d0))
    return int(bfs_distances(g, far).max())


def _bit_setup(g: CSRGraph, sources: np.ndarray) -> tuple[np.ndarray, int]:
    s = len(sources)
    words = (s + 63) // 64
    reached = np.zeros((g.n, words), dtype=np.uint64)
    cols = np.arange(s, dtype=np.int64)
    reached[sources, cols // 64] |= np.uint64(1) << (cols % 64).astype(np.uint64)
    return reached, words


def _bit_step(g: CSRGraph, reached: np.ndarray) -> np.ndarray:
    """OR of each vertex's in-neighborhood bitsets."""
    gathered = reached[g.edge_dst_sorted_src]
    return np.bitwise_or.reduceat(gathered, g.group_starts, axis=0)


def bit_diameter(g: CSRGraph) -> int:
    """Exact diameter via all-sources bit-parallel reach (no matrix kept)."""
    sources = np.arange(g.n, dtype=np.int64)
    reached, _ = _bit_setup(g, sources)
    level = 0
    while True:
        nxt = _bit_step(g, reached)
        nxt |= reached
        if np.array_equal(nxt, reached):
            return level
        reached = nxt
        level += 1


def bit_distance_matrix(g: CSRGraph, sources: np.ndarray | None = None) -> np.ndarray:
    """Distance matrix dist[v, j] from every vertex v to sources[j] (int16).

    Unreachable pairs keep -1.  Memory is O(n * len(sources)).
    """
    if sources is None:
        sources = np.arange(g.n, dtype=np.int64)
    else:
        sources = np.asarray(sources, dtype=np.int64)
    s = len(sources)
    reached, words = _bit_setup(g, sources)
    dist = np.full((g.n, s), -1, dtype=np.int16)
    dist[sources, np.arange(s)] = 0
    level = 0
    while True:
        nxt = _bit_step(g, reached)
        new = nxt & ~reached
        if not new.any():
            return dist
        level += 1
        bits = np.unpackbits(new.view(np.uint8), axis=1, bitorder="little")[:, :s]
        dist[bits.astype(bool)] = level
        reached |= nxt
