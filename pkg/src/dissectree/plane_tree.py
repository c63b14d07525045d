"""Plane trees, planting, enumeration, and conditioned Galton-Watson sampling.

A plane tree is stored as its preorder sequence of child counts.  The
conditioned samplers run rejection against an i.i.d. offspring stream; the
hot path parses the stream in blocks, locating completed subtree segments
as new running minima of the centered walk and cutting oversized attempts
the moment their running leaf (or vertex) count passes the cap.  A plain
sequential sampler with identical stream semantics is kept alongside as an
independent oracle.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from ._graph import CSRGraph, tree_diameter as _tree_diameter
from .offspring import OffspringDistribution, sample_offspring

ATTEMPT_CAP_DEFAULT = 100_000_000


class CapExhausted(RuntimeError):
    """Rejection budget ran out before enough conditioned samples landed."""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class PlaneTree:
    """Rooted plane tree as preorder child counts.

    Vertex i is the i-th vertex visited in depth-first (preorder) order;
    degrees[i] is its number of children.  Derived views (parents, heights,
    children in order, leaf list) are computed on first use and cached.
    """

    __slots__ = ("degrees", "_parent", "_heights", "_children", "_rank",
                 "_leaves", "_graph")

    def __init__(self, degrees, validate: bool = True):
        self.degrees = np.ascontiguousarray(degrees, dtype=np.int64)
        if self.degrees.ndim != 1 or self.degrees.size == 0:
            raise ValueError("degrees must be a nonempty 1-d sequence")
        if validate:
            walk = np.cumsum(self.degrees) - np.arange(1, self.n + 1)
            if walk[-1] != -1 or (self.n > 1 and walk[:-1].min() < 0):
                raise ValueError("degree sequence is not a single plane tree")
        self._parent = None
        self._heights = None
        self._children = None
        self._rank = None
        self._leaves = None
        self._graph = None

    @property
    def n(self) -> int:
        return self.degrees.size

    @property
    def leaves(self) -> np.ndarray:
        """Leaf vertices in preorder, which is their left-to-right order."""
        if self._leaves is None:
            self._leaves = np.flatnonzero(self.degrees == 0)
        return self._leaves

    @property
    def leaf_count(self) -> int:
        return int(self.leaves.size)

    def _fill_parent(self) -> None:
        n = self.n
        parent = np.empty(n, dtype=np.int64)
        heights = np.empty(n, dtype=np.int64)
        parent[0] = -1
        heights[0] = 0
        deg = self.degrees
        sv = [0]
        sc = [int(deg[0])]
        for v in range(1, n):
            while sc[-1] == 0:
                sv.pop()
                sc.pop()
            p = sv[-1]
            sc[-1] -= 1
            parent[v] = p
            heights[v] = heights[p] + 1
            if deg[v] > 0:
                sv.append(v)
                sc.append(int(deg[v]))
        self._parent = parent
        self._heights = heights

    @property
    def parent(self) -> np.ndarray:
        if self._parent is None:
            self._fill_parent()
        return self._parent

    @property
    def heights(self) -> np.ndarray:
        if self._heights is None:
            self._fill_parent()
        return self._heights

    @property
    def height(self) -> int:
        return int(self.heights.max())

    def _fill_children(self) -> None:
        n = self.n
        par = self.parent
        counts = np.bincount(par[1:], minlength=n)
        starts = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=starts[1:])
        order = np.argsort(par[1:], kind="stable") + 1
        rank = np.empty(n, dtype=np.int64)
        rank[0] = 0
        rank[order] = np.arange(n - 1, dtype=np.int64) - starts[par[order]]
        self._children = (order, starts)
        self._rank = rank

    def children(self, v: int) -> np.ndarray:
        """Children of v in left-to-right order."""
        if self._children is None:
            self._fill_children()
        order, starts = self._children
        return order[starts[v]:starts[v + 1]]

    @property
    def child_rank(self) -> np.ndarray:
        """child_rank[v] = position of v among its siblings (root gets 0)."""
        if self._rank is None:
            self._fill_children()
        return self._rank

    def ancestors(self, v: int) -> list[int]:
        """Path root -> v, inclusive."""
        par = self.parent
        path = [int(v)]
        while path[-1] != 0:
            path.append(int(par[path[-1]]))
        path.reverse()
        return path

    def spine_splits(self, v: int) -> list[tuple[int, int]]:
        """Sibling splits (left count, right count) along root -> v.

        One pair per strict ancestor of v other than the root: if the path
        enters child number r (0-based) of an ancestor with k children, the
        pair is (r, k - 1 - r).  The root's own split is skipped.
        """
        path = self.ancestors(v)
        rank = self.child_rank
        deg = self.degrees
        return [(int(rank[path[i + 1]]), int(deg[path[i]] - 1 - rank[path[i + 1]]))
                for i in range(1, len(path) - 1)]

    def distance(self, u: int, v: int) -> int:
        """Graph distance in the tree, by climbing to the common ancestor."""
        h = self.heights
        par = self.parent
        d = 0
        while h[u] > h[v]:
            u = par[u]
            d += 1
        while h[v] > h[u]:
            v = par[v]
            d += 1
        while u != v:
            u = par[u]
            v = par[v]
            d += 2
        return d

    def graph(self) -> CSRGraph:
        if self._graph is None:
            if self.n == 1:
                raise ValueError("single-vertex tree has no edges")
            kids = np.arange(1, self.n, dtype=np.int64)
            par = self.parent[1:]
            self._graph = CSRGraph(self.n,
                                   np.concatenate((kids, par)),
                                   np.concatenate((par, kids)))
        return self._graph

    def diameter(self) -> int:
        if self.n == 1:
            return 0
        return _tree_diameter(self.graph())

    def __eq__(self, other) -> bool:
        return isinstance(other, PlaneTree) and np.array_equal(
            self.degrees, other.degrees)

    def __hash__(self) -> int:
        return hash(self.degrees.tobytes())

    def __repr__(self) -> str:
        return f"PlaneTree(n={self.n}, leaves={self.leaf_count})"


class PlantedTree(PlaneTree):
    """Plane tree whose root has exactly one child (the planted edge).

    The root acts as an extra distinguished leaf, listed first.
    """

    def __init__(self, degrees, validate: bool = True):
        super().__init__(degrees, validate=validate)
        if self.degrees[0] != 1:
            raise ValueError("planted tree root must have exactly one child")

    @property
    def planted_leaves(self) -> np.ndarray:
        """Root first, then the genuine leaves in left-to-right order."""
        return np.concatenate(([0], self.leaves))

    def leaf_splits(self, k: int) -> list[tuple[int, int]]:
        """Splits along the path from the root to distinguished leaf k >= 1."""
        if k < 1 or k > self.leaf_count:
            raise ValueError("leaf index out of range")
        return self.spine_splits(int(self.planted_leaves[k]))


def plant(tree: PlaneTree) -> PlantedTree:
    """Hang the tree below a fresh degree-one root."""
    return PlantedTree(np.concatenate(([1], tree.degrees)), validate=False)


def unplant(tree: PlantedTree) -> PlaneTree:
    if tree.degrees[0] != 1:
        raise ValueError("not a planted tree")
    return PlaneTree(tree.degrees[1:], validate=False)


def serialize_tree(tree: PlaneTree) -> str:
    return " ".join(str(int(d)) for d in tree.degrees)


def deserialize_tree(text: str) -> PlaneTree:
    parts = text.split()
    if not parts:
        raise ValueError("empty tree text")
    return PlaneTree(np.array([int(p) for p in parts], dtype=np.int64))


def restricted_tree(tree: PlaneTree, v: int) -> tuple[PlaneTree, int]:
    """Subtree spanned by the root-to-v path plus all children of its vertices.

    Off-path children become leaves; v keeps its children as leaves.  Returns
    the new tree and the index of v inside it.
    """
    path = tree.ancestors(v)
    rank = tree.child_rank
    deg = tree.degrees
    out: list[int] = []
    tail: list[int] = []
    v_index = -1
    for i, w in enumerate(path):
        k = int(deg[w])
        out.append(k)
        if w == v:
            v_index = len(out) - 1
            out.extend([0] * k)
        else:
            r = int(rank[path[i + 1]])
            out.extend([0] * r)
            tail.append(k - 1 - r)
    for s in reversed(tail):
        out.extend([0] * s)
    return PlaneTree(np.array(out, dtype=np.int64), validate=False), v_index


# -- exhaustive enumeration --------------------------------------------------

def _compositions(total: int, parts: int):
    """Ordered positive integer compositions of total into parts pieces."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _shapes_with_leaves(m: int) -> tuple[tuple[int, ...], ...]:
    if m == 1:
        return ((0,),)
    out = []
    for k in range(2, m + 1):
        for comp in _compositions(m, k):
            for parts in product(*(_shapes_with_leaves(c) for c in comp)):
                flat = (k,)
                for p in parts:
                    flat = flat + p
                out.append(flat)
    return tuple(out)


def enumerate_no_unary_trees(n_leaves: int) -> list[PlaneTree]:
    """All plane trees with the given leaf count and no single-child vertex."""
    if n_leaves < 1:
        raise ValueError("need at least one leaf")
    if n_leaves > 12:
        raise ValueError("enumeration capped at 12 leaves")
    return [PlaneTree(np.array(s, dtype=np.int64), validate=False)
            for s in _shapes_with_leaves(n_leaves)]


def gw_log_weight(mu: OffspringDistribution, tree: PlaneTree) -> float:
    """Log of the product of offspring probabilities over all vertices."""
    total = 0.0
    for d in tree.degrees:
        p = mu.prob(int(d))
        if p == 0.0:
            return -np.inf
        total += np.log(p)
    return total


def gw_weight(mu: OffspringDistribution, tree: PlaneTree) -> float:
    return float(np.exp(gw_log_weight(mu, tree)))


# -- sequential sampler (oracle) ---------------------------------------------

def sample_gw(mu: OffspringDistribution, rng: np.random.Generator,
              leaf_cap: int | None = None,
              vertex_cap: int | None = None) -> PlaneTree | None:
    """One unconditioned tree, drawn vertex by vertex in preorder.

    Returns None if a cap cut the attempt short.  Consumes the offspring
    stream exactly like one attempt of the block parser: a cut discards
    the draw that crossed the cap and nothing after it.
    """
    degrees = []
    open_edges = 1
    leaves = 0
    while open_edges > 0:
        k = sample_offspring(mu, rng)
        degrees.append(k)
        open_edges += k - 1
        if k == 0:
            leaves += 1
            if leaf_cap is not None and leaves > leaf_cap:
                return None
        if vertex_cap is not None and len(degrees) > vertex_cap:
            return None
    return PlaneTree(np.array(degrees, dtype=np.int64), validate=False)


def sample_conditioned_naive(mu: OffspringDistribution, rng: np.random.Generator,
                             n_leaves: int | None = None,
                             n_vertices: int | None = None,
                             attempt_cap: int = ATTEMPT_CAP_DEFAULT,
                             ) -> tuple[PlaneTree, int]:
    """Plain rejection loop; returns (tree, attempts used).  Oracle only."""
    if (n_leaves is None) == (n_vertices is None):
        raise ValueError("pass exactly one of n_leaves, n_vertices")
    attempts = 0
    while attempts < attempt_cap:
        attempts += 1
        t = sample_gw(mu, rng, leaf_cap=n_leaves, vertex_cap=n_vertices)
        if t is None:
            continue
        if n_leaves is not None and t.leaf_count == n_leaves:
            return t, attempts
        if n_vertices is not None and t.n == n_vertices:
            return t, attempts
    raise CapExhausted("rejection budget exhausted", attempts)


# -- block stream sampler ----------------------------------------------------

class TreeSampler:
    """Conditioned sampler over a persistent i.i.d. offspring stream.

    The stream is materialized in growing blocks.  Within a parse window the
    ends of consecutive complete attempts are exactly the positions where the
    centered walk reaches a new minimum below the window base, so they are
    found in bulk; leaf counts come from differences of the running zero
    count.  An attempt whose leaf (or vertex) count passes the cap is cut at
    the offending draw and parsing restarts right after it, which reproduces
    a sequential generate-and-cut loop draw for draw.
    """

    def __init__(self, mu: OffspringDistribution, rng: np.random.Generator,
                 block: int = 4096, chunk: int = 8192):
        self.mu = mu
        self.rng = rng
        self.block = block
        self.chunk = chunk
        self.pos = 0
        self.attempts_total = 0
        self.buf = np.empty(0, dtype=np.int64)
        self.W = np.empty(0, dtype=np.int64)
        self.Z = np.empty(0, dtype=np.int64)

    def _refill(self) -> None:
        tail = self.buf[self.pos:]
        fresh = self.mu.sample_block(self.rng, self.block)
        self.block = min(self.block * 2, 1 << 19)
        buf = np.concatenate((tail, fresh)) if tail.size else fresh
        self.buf = buf
        self.W = np.cumsum(buf - 1, dtype=np.int64)
        self.Z = np.cumsum(buf == 0, dtype=np.int64)
        self.pos = 0

    def _run(self, mode: str, target: int,
             max_accept: int | None = None,
             max_attempts: int | None = None,
             collect: bool = True) -> tuple[list[np.ndarray], int, int]:
        """Consume attempts until a limit hits.

        Returns (collected degree arrays, attempts consumed, successes).
        The cap that cuts oversized attempts equals the target, so every
        accepted segment is exact.
        """
        out: list[np.ndarray] = []
        accepted = 0
        attempts = 0
        span = self.chunk
        while True:
            if max_accept is not None and accepted >= max_accept:
                break
            if max_attempts is not None and attempts >= max_attempts:
                break
            if self.pos >= self.buf.size:
                self._refill()
            buf, W, Z = self.buf, self.W, self.Z
            pos = self.pos
            end = min(buf.size, pos + span)
            wbase = W[pos - 1] if pos else 0
            zbase = Z[pos - 1] if pos else 0
            rel = W[pos:end] - wbase
            run_min = np.minimum.accumulate(rel)
            prev = np.empty_like(run_min)
            prev[0] = run_min[0] + 1
            prev[1:] = run_min[:-1]
            cand = np.flatnonzero((run_min < prev) & (run_min <= -1))

            if cand.size:
                zc = Z[pos + cand]
                lam = np.diff(zc, prepend=zbase)
                if mode == "leaves":
                    stat = lam
                else:
                    stat = np.diff(cand, prepend=-1)
                bad = stat > target
                clean = int(np.argmax(bad)) if bad.any() else cand.size

                take = clean
                if max_attempts is not None:
                    take = min(take, max_attempts - attempts)
                hit_accept = False
                if take > 0:
                    ok = stat[:take] == target
                    k_ok = int(ok.sum())
                    if max_accept is not None and accepted + k_ok >= max_accept:
                        need = max_accept - accepted
                        cut = int(np.flatnonzero(ok)[need - 1])
                        take = cut + 1
                        ok = ok[:take]
                        k_ok = need
                        hit_accept = True
                    if collect and k_ok:
                        for i in np.flatnonzero(ok):
                            s = pos + (int(cand[i - 1]) + 1 if i > 0 else 0)
                            e = pos + int(cand[i])
                            out.append(buf[s:e + 1].copy())
                    attempts += take
                    accepted += k_ok
                    self.pos = pos + int(cand[take - 1]) + 1
                    span = self.chunk
                    if hit_accept or take < clean:
                        continue
                if clean < cand.size:
                    # cut the oversized attempt at the draw that crossed
                    if max_attempts is not None and attempts >= max_attempts:
                        continue
                    if mode == "leaves":
                        ztarget = (zc[clean - 1] if clean else zbase) + target + 1
                        cut_at = int(np.searchsorted(Z, ztarget, side="left"))
                    else:
                        s_rel = int(cand[clean - 1]) + 1 if clean else 0
                        cut_at = pos + s_rel + target
                    attempts += 1
                    self.pos = cut_at + 1
                    span = self.chunk
                continue

            # window is one unresolved attempt prefix: cut or widen
            if mode == "leaves":
                if Z[end - 1] - zbase > target:
                    cut_at = int(np.searchsorted(Z, zbase + target + 1, side="left"))
                    attempts += 1
                    self.pos = cut_at + 1
                    span = self.chunk
                    continue
            else:
                if end - pos > target:
                    attempts += 1
                    self.pos = pos + target + 1
                    span = self.chunk
                    continue
            if end < buf.size:
                span *= 2
            else:
                self._refill()
                span = max(span * 2, self.chunk)

        self.attempts_total += attempts
        return out, attempts, accepted

    def sample_leaves(self, n_leaves: int, want: int = 1,
                      attempt_cap: int = ATTEMPT_CAP_DEFAULT) -> list[PlaneTree]:
        """Trees conditioned to exactly n_leaves leaves."""
        if n_leaves < 1:
            raise ValueError("need at least one leaf")
        segs, attempts, got = self._run("leaves", n_leaves, max_accept=want,
                                        max_attempts=attempt_cap)
        if got < want:
            raise CapExhausted(
                f"no tree with {n_leaves} leaves in {attempts} attempts",
                attempts)
        return [PlaneTree(s, validate=False) for s in segs]

    def sample_vertices(self, n_vertices: int, want: int = 1,
                        attempt_cap: int = ATTEMPT_CAP_DEFAULT) -> list[PlaneTree]:
        """Trees conditioned to exactly n_vertices vertices."""
        if n_vertices < 1:
            raise ValueError("need at least one vertex")
        segs, attempts, got = self._run("vertices", n_vertices, max_accept=want,
                                        max_attempts=attempt_cap)
        if got < want:
            raise CapExhausted(
                f"no tree with {n_vertices} vertices in {attempts} attempts",
                attempts)
        return [PlaneTree(s, validate=False) for s in segs]

    def probe_leaves(self, n_leaves: int, attempts: int) -> int:
        """Successes among exactly `attempts` rejection attempts."""
        _, used, got = self._run("leaves", n_leaves, max_attempts=attempts,
                                 collect=False)
        assert used == attempts
        return got


def sample_conditioned_leaves(mu: OffspringDistribution, n_leaves: int,
                              rng: np.random.Generator,
                              attempt_cap: int = ATTEMPT_CAP_DEFAULT) -> PlaneTree:
    return TreeSampler(mu, rng).sample_leaves(n_leaves, 1, attempt_cap)[0]


def sample_conditioned_vertices(mu: OffspringDistribution, n_vertices: int,
                                rng: np.random.Generator,
                                attempt_cap: int = ATTEMPT_CAP_DEFAULT) -> PlaneTree:
    return TreeSampler(mu, rng).sample_vertices(n_vertices, 1, attempt_cap)[0]
