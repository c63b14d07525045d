"""Dissections of a convex polygon and their dual plane trees.

Vertices of the polygon with n sides are 0..n-1 in counterclockwise order;
the side (n-1, 0) is the distinguished root side.  A dissection is a
non-crossing set of chords (chords may share endpoints).  The dual tree has
one internal vertex per inner face and one leaf per non-root side, ordered
so that the k-th leaf in left-to-right order sits on the side (k-1, k).

The correspondence is a bijection onto plane trees with n-1 leaves and no
single-child vertex, and it maps the face-degree product weight to the
offspring-probability product over internal vertices.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right

import numpy as np

from ._graph import CSRGraph, bfs_distances, bit_diameter, bit_distance_matrix
from .offspring import OffspringDistribution
from .plane_tree import PlaneTree, enumerate_no_unary_trees


def _check_noncrossing(chords: list[tuple[int, int]]) -> None:
    """Chords sorted by (a asc, b desc); stack sweep finds any crossing."""
    stack: list[tuple[int, int]] = []
    for a, b in sorted(chords, key=lambda ab: (ab[0], -ab[1])):
        while stack and stack[-1][1] <= a:
            stack.pop()
        if stack and stack[-1][1] < b:
            raise ValueError(f"chords {stack[-1]} and {(a, b)} cross")
        stack.append((a, b))


class Dissection:
    """Non-crossing chord set inside the convex polygon with n sides."""

    __slots__ = ("n", "chords", "_adj", "_graph", "_tree")

    def __init__(self, n: int, chords=(), validate: bool = True):
        self.n = int(n)
        canon = sorted((int(min(a, b)), int(max(a, b))) for a, b in chords)
        self.chords = tuple(canon)
        if validate:
            if self.n < 3:
                raise ValueError("polygon needs at least 3 sides")
            if len(set(canon)) != len(canon):
                raise ValueError("duplicate chord")
            for a, b in canon:
                if not (0 <= a < b <= self.n - 1):
                    raise ValueError(f"chord {(a, b)} out of range")
                if b - a < 2 or (a == 0 and b == self.n - 1):
                    raise ValueError(f"{(a, b)} is a polygon side, not a chord")
            _check_noncrossing(canon)
        self._adj = None
        self._graph = None
        self._tree = None

    @property
    def chord_count(self) -> int:
        return len(self.chords)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Undirected edges (sides then chords), one row per edge."""
        n = self.n
        u = np.arange(n, dtype=np.int64)
        v = (u + 1) % n
        if self.chords:
            ca = np.array([c[0] for c in self.chords], dtype=np.int64)
            cb = np.array([c[1] for c in self.chords], dtype=np.int64)
            u = np.concatenate((u, ca))
            v = np.concatenate((v, cb))
        return u, v

    def _neighbors(self) -> list[np.ndarray]:
        """Sorted neighbor list per vertex (sides and chords)."""
        if self._adj is None:
            n = self.n
            adj: list[list[int]] = [[(i - 1) % n, (i + 1) % n] for i in range(n)]
            for a, b in self.chords:
                adj[a].append(b)
                adj[b].append(a)
            self._adj = [np.array(sorted(x), dtype=np.int64) for x in adj]
        return self._adj

    # -- duality --------------------------------------------------------

    def _face_walk(self, a: int, b: int) -> list[int]:
        """Vertices of the inner face bounded below by the edge (a, b).

        Walks a = x0 < x1 < ... < xj = b where each step jumps to the
        farthest neighbor inside the region; non-crossing makes that jump
        the face edge.  The first step must stay strictly below b so the
        bounding edge itself is not taken.
        """
        neigh = self._neighbors()
        face = [a]
        lst = neigh[a]
        i = bisect_left(lst, b) - 1
        x = int(lst[i])
        face.append(x)
        while x != b:
            lst = neigh[x]
            i = bisect_right(lst, b) - 1
            x = int(lst[i])
            face.append(x)
        return face

    def to_tree(self) -> PlaneTree:
        """Dual plane tree rooted at the face on the root side (n-1, 0)."""
        if self._tree is not None:
            return self._tree
        degrees: list[int] = []
        # stack items: (a, b) segment whose face becomes the next vertex,
        # or None for a leaf (a polygon side)
        stack: list[tuple[int, int] | None] = [(0, self.n - 1)]
        while stack:
            item = stack.pop()
            if item is None:
                degrees.append(0)
                continue
            face = self._face_walk(*item)
            degrees.append(len(face) - 1)
            for lo, hi in zip(face[-2::-1], face[:0:-1]):
                stack.append(None if hi - lo == 1 else (lo, hi))
        self._tree = PlaneTree(np.array(degrees, dtype=np.int64), validate=False)
        return self._tree

    def faces(self) -> list[tuple[int, ...]]:
        """All inner faces as increasing vertex tuples (root face first)."""
        out: list[tuple[int, ...]] = []
        stack: list[tuple[int, int]] = [(0, self.n - 1)]
        while stack:
            a, b = stack.pop()
            face = self._face_walk(a, b)
            out.append(tuple(face))
            for lo, hi in zip(face[:-1], face[1:]):
                if hi - lo > 1:
                    stack.append((lo, hi))
        return out

    # -- weights ---------------------------------------------------------

    def log_weight(self, mu: OffspringDistribution) -> float:
        """Log Boltzmann weight: product over inner faces of mu_{deg-1}."""
        total = 0.0
        for d in self.to_tree().degrees:
            if d > 0:
                p = mu.prob(int(d))
                if p == 0.0:
                    return -np.inf
                total += np.log(p)
        return total

    def weight(self, mu: OffspringDistribution) -> float:
        return float(np.exp(self.log_weight(mu)))

    # -- metric ----------------------------------------------------------

    def graph(self) -> CSRGraph:
        if self._graph is None:
            u, v = self.edge_arrays()
            self._graph = CSRGraph(self.n, np.concatenate((u, v)),
                                   np.concatenate((v, u)))
        return self._graph

    def distances_from(self, source: int = 0) -> np.ndarray:
        return bfs_distances(self.graph(), source)

    def distance_matrix(self, sources=None) -> np.ndarray:
        return bit_distance_matrix(self.graph(), sources)

    def diameter(self) -> int:
        return bit_diameter(self.graph())

    def radius(self) -> int:
        """Eccentricity of the root vertex 0."""
        return int(self.distances_from(0).max())

    # -- misc --------------------------------------------------------------

    def rotate(self, shift: int) -> "Dissection":
        """Relabel every vertex v as (v + shift) mod n."""
        n = self.n
        return Dissection(n, [((a + shift) % n, (b + shift) % n)
                              for a, b in self.chords])

    def __eq__(self, other) -> bool:
        return (isinstance(other, Dissection) and self.n == other.n
                and self.chords == other.chords)

    def __hash__(self) -> int:
        return hash((self.n, self.chords))

    def __repr__(self) -> str:
        return f"Dissection(n={self.n}, chords={len(self.chords)})"


def from_tree(tree: PlaneTree) -> Dissection:
    """Inverse duality: each non-root internal vertex contributes the chord
    cutting off the sides its subtree's leaves sit on."""
    deg = tree.degrees
    n_vert = tree.n
    if n_vert > 1 and (deg == 1).any():
        raise ValueError("dual trees cannot have single-child vertices")
    m = tree.leaf_count
    if m < 2:
        raise ValueError("need at least two leaves")
    sizes = np.ones(n_vert, dtype=np.int64)
    par = tree.parent
    for v in range(n_vert - 1, 0, -1):
        sizes[par[v]] += sizes[v]
    leaf_cum = np.cumsum(deg == 0)
    chords = []
    for u in range(1, n_vert):
        if deg[u] > 0:
            first = int(leaf_cum[u - 1]) + 1
            last = int(leaf_cum[u + sizes[u] - 1])
            chords.append((first - 1, last))
    return Dissection(m + 1, chords, validate=False)


def sample_boltzmann(mu: OffspringDistribution, n: int,
                     rng: np.random.Generator,
                     attempt_cap: int | None = None) -> Dissection:
    """One draw from the face-weight measure on dissections of size n."""
    from .plane_tree import ATTEMPT_CAP_DEFAULT, sample_conditioned_leaves
    if not mu.dissection_mode:
        raise ValueError("offspring law must have no mass at 1")
    cap = ATTEMPT_CAP_DEFAULT if attempt_cap is None else attempt_cap
    tree = sample_conditioned_leaves(mu, n - 1, rng, attempt_cap=cap)
    return from_tree(tree)


def enumerate_dissections(n: int) -> list[Dissection]:
    """Every dissection of the polygon with n sides (n <= 13), via duality."""
    if n < 3:
        raise ValueError("polygon needs at least 3 sides")
    if n > 13:
        raise ValueError("enumeration capped at n = 13")
    return [from_tree(t) for t in enumerate_no_unary_trees(n - 1)]


def enumerate_dissections_direct(n: int) -> list[Dissection]:
    """Independent route: depth-first search over non-crossing chord sets."""
    all_chords = [(a, b) for a in range(n) for b in range(a + 2, n)
                  if not (a == 0 and b == n - 1)]
    crosses = {}
    for i, (a, b) in enumerate(all_chords):
        bad = []
        for j, (c, d) in enumerate(all_chords):
            if j <= i:
                continue
            if (a < c < b < d) or (c < a < d < b):
                bad.append(j)
        crosses[i] = bad
    out = []
    choice: list[int] = []

    def rec(start: int, blocked: frozenset):
        out.append(Dissection(n, [all_chords[i] for i in choice], validate=False))
        for i in range(start, len(all_chords)):
            if i in blocked:
                continue
            choice.append(i)
            rec(i + 1, blocked | frozenset(crosses[i]))
            choice.pop()

    rec(0, frozenset())
    return out


def partition_function(mu: OffspringDistribution, n: int) -> float:
    """Total Boltzmann weight of all dissections of size n (n <= 13)."""
    return float(sum(d.weight(mu) for d in enumerate_dissections(n)))


def serialize_dissection(d: Dissection) -> str:
    chord_part = ",".join(f"{a}-{b}" for a, b in d.chords)
    return f"{d.n}\n{chord_part}"


def deserialize_dissection(text: str) -> Dissection:
    lines = text.strip().splitlines()
    if not lines:
        raise ValueError("empty dissection text")
    n = int(lines[0])
    chords = []
    if len(lines) > 1 and lines[1].strip():
        for part in lines[1].split(","):
            a, b = part.split("-")
            chords.append((int(a), int(b)))
    return Dissection(n, chords)
