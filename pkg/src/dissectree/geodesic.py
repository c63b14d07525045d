"""Geodesic exploration along tree spines.

Walking from the root toward a target vertex, each step passes a vertex
whose other children split into `left` of the path and `right` of the path.
The exploration keeps a pointer telling which side of the spine the current
geodesic candidate hugs (left, right, or riding the spine itself) and emits
a nonnegative increment; the increments sum to a height that tracks the
dissection-graph distance to within one (checked exactly in the tests).

The root's own split never contributes: paths are measured as if the tree
were planted, and a planted root has split (0, 0) which is a no-op anyway.
"""

from __future__ import annotations

import numpy as np

from .plane_tree import PlaneTree

LEFT, RIGHT, UP = "L", "R", "U"
_CODE = {LEFT: 0, RIGHT: 1, UP: 2}
_NAME = (LEFT, RIGHT, UP)


def _step(code: int, g: int, d: int) -> tuple[int, int]:
    """Integer-coded transition; returns (increment, new pointer code)."""
    if code == 0:  # hugging the left side
        if g < d + 1:
            return g, 0
        if g > d + 1:
            return d + 1, 1
        return g, 2
    if code == 1:  # hugging the right side
        if d < g + 1:
            return d, 1
        if d > g + 1:
            return g + 1, 0
        return d, 2
    # riding the spine
    if d < g:
        return d, 1
    if d > g:
        return g, 0
    return d, 2


def geod_step(pointer: str, left: int, right: int) -> tuple[int, str]:
    """One exploration step across a split with the given side counts."""
    if left < 0 or right < 0:
        raise ValueError("side counts must be nonnegative")
    inc, code = _step(_CODE[pointer], left, right)
    return inc, _NAME[code]


def subtree_height(tree: PlaneTree, v: int) -> int:
    """Folded increment total along the root-to-v path (root split skipped)."""
    total = 0
    code = 0
    for g, d in tree.spine_splits(v):
        inc, code = _step(code, g, d)
        total += inc
    return total


def height_profile(tree: PlaneTree) -> np.ndarray:
    """subtree_height for every vertex, in one preorder pass."""
    n = tree.n
    H = np.zeros(n, dtype=np.int64)
    P = np.zeros(n, dtype=np.int8)
    deg = tree.degrees
    par = tree.parent
    rank = tree.child_rank
    for v in range(1, n):
        p = int(par[v])
        if p == 0:
            H[v] = 0
            P[v] = 0
        else:
            r = int(rank[v])
            inc, code = _step(int(P[p]), r, int(deg[p]) - 1 - r)
            H[v] = H[p] + inc
            P[v] = code
    return H


def leaf_height_profile(tree: PlaneTree) -> np.ndarray:
    """Heights at the leaves only, in left-to-right leaf order."""
    return height_profile(tree)[tree.leaves]


def distance_height_slack(tree: PlaneTree) -> int:
    """Worst gap between polygon distances from vertex 0 and leaf heights.

    Builds the dissection dual to ``tree``, BFS-labels every polygon vertex
    with its graph distance from vertex 0, computes the exploration height of
    every leaf on the planted tree, and returns max_k |d(0, k) - height(k)|.
    The two quantities are never more than one apart; anything larger means
    the side-to-leaf correspondence or the step table is broken.
    """
    from .dissection import from_tree
    from .plane_tree import plant

    planted = plant(tree)
    heights = height_profile(planted)[planted.planted_leaves[1:]]
    dist = from_tree(tree).distances_from(0)
    return int(np.max(np.abs(dist[1:] - heights)))
