"""The two-pointer Markov chain driving geodesic heights along a spine.

Splits (left, right) with law P(left=a, right=b) = mu_{a+b+1} arrive i.i.d.
(size-biased child count, uniform child position).  The exploration pointer
collapses to two states: D (hugging either side; the two sides are mirror
images and exchangeable splits make them interchangeable) and U (riding the
spine).  Each step emits a nonnegative increment whose stationary mean is
the geodesic constant of the offspring law.

Step laws in closed form, writing T(k) for the upper tail sum of mu from k:
  from D:  (i, D) with prob T(2i+1) * (2 if i >= 1 else 1)
           (i, U) with prob mu_{2i},  i >= 1
  from U:  (i, D) with prob 2 * T(2i+2)
           (i, U) with prob mu_{2i+1}
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .offspring import OffspringDistribution, sample_spine_block

DOWN, UP = "D", "U"

_LAW_CUTOFF = 1e-18


def chain_step(pointer: str, left: int, right: int) -> tuple[int, str]:
    """Deterministic update for one split; returns (increment, new pointer)."""
    if pointer == DOWN:
        if left == right + 1:
            return left, UP
        return min(left, right + 1), DOWN
    if pointer == UP:
        return min(left, right), (UP if left == right else DOWN)
    raise ValueError(f"unknown pointer {pointer!r}")


def joint_step_law(mu: OffspringDistribution, pointer: str,
                   cutoff: float = _LAW_CUTOFF) -> dict[tuple[int, str], float]:
    """Exact one-step law of (increment, pointer) from the given pointer."""
    out: dict[tuple[int, str], float] = {}
    if mu.finite_support:
        imax = mu.max_support() // 2 + 1
    else:
        imax = None
    i = 0
    while True:
        if pointer == DOWN:
            pd = mu.tail_sum(2 * i + 1) * (2 if i >= 1 else 1)
            pu = mu.prob(2 * i) if i >= 1 else 0.0
        else:
            pd = 2.0 * mu.tail_sum(2 * i + 2)
            pu = mu.prob(2 * i + 1)
        if pd > 0.0:
            out[(i, DOWN)] = out.get((i, DOWN), 0.0) + pd
        if pu > 0.0:
            out[(i, UP)] = out.get((i, UP), 0.0) + pu
        i += 1
        if imax is not None:
            if i > imax:
                break
        elif pd < cutoff and pu < cutoff and i > 2:
            break
    return out


def driving_matrix(mu: OffspringDistribution) -> np.ndarray:
    """Pointer marginal transition matrix, rows/cols ordered (D, U)."""
    return np.array([
        [mu.odd_mass + mu.mu0, mu.even_pos_mass],
        [mu.even_mass, mu.odd_mass],
    ])


def stationary(mu: OffspringDistribution) -> tuple[float, float]:
    """Stationary pointer law by solving the 2-state balance equations."""
    P = driving_matrix(mu)
    A = np.vstack([P.T - np.eye(2), np.ones(2)])
    b = np.array([0.0, 0.0, 1.0])
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    return float(pi[0]), float(pi[1])


def compose_laws(first: dict[tuple[int, str], float],
                 law_of: dict[str, dict[tuple[int, str], float]],
                 ) -> dict[tuple[int, str], float]:
    """One more step: convolve a cumulative (total, pointer) law with the
    per-pointer step laws."""
    out: dict[tuple[int, str], float] = {}
    for (h, p), q in first.items():
        for (x, p2), w in law_of[p].items():
            key = (h + x, p2)
            out[key] = out.get(key, 0.0) + q * w
    return out


def two_step_law(mu: OffspringDistribution, pointer: str,
                 ) -> dict[tuple[int, str], float]:
    """Law of (second increment, pointer) two steps out, marginalizing the
    first increment."""
    step = {DOWN: joint_step_law(mu, DOWN), UP: joint_step_law(mu, UP)}
    out: dict[tuple[int, str], float] = {}
    for (_, p1), q in step[pointer].items():
        for key, w in step[p1].items():
            out[key] = out.get(key, 0.0) + q * w
    return out


def chain_height_law(mu: OffspringDistribution, depth: int,
                     ) -> dict[int, float]:
    """Exact law of the summed increments after depth-1 steps from (0, D).

    This is the height law at spine depth `depth`, the root split
    contributing nothing.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    law_of = {DOWN: joint_step_law(mu, DOWN), UP: joint_step_law(mu, UP)}
    acc: dict[tuple[int, str], float] = {(0, DOWN): 1.0}
    for _ in range(depth - 1):
        acc = compose_laws(acc, law_of)
    out: dict[int, float] = {}
    for (h, _), q in acc.items():
        out[h] = out.get(h, 0.0) + q
    return out


def spine_height_law_exhaustive(mu: OffspringDistribution, depth: int,
                                ) -> dict[int, float]:
    """Same law by brute force: expected number of depth-`depth` vertices
    at each height, summed over all depth-truncated planted trees with
    their offspring-product weights.

    Criticality makes the total mass one.  Finite support only.
    """
    from .geodesic import height_profile
    from .plane_tree import PlaneTree
    if not mu.finite_support:
        raise ValueError("exhaustive route needs finite support")
    support = mu.support()

    def expand(levels_left: int):
        """(preorder degrees, weight) of subtrees truncated levels_left down."""
        if levels_left == 0:
            yield (0,), 1.0
            return
        for k in support:
            w0 = mu.prob(k)
            if k == 0:
                yield (0,), w0
                continue
            for parts, w in _forest(k, levels_left - 1):
                yield (k,) + parts, w0 * w

    def _forest(count: int, levels_left: int):
        if count == 0:
            yield (), 1.0
            return
        for head, w1 in expand(levels_left):
            for rest, w2 in _forest(count - 1, levels_left):
                yield head + rest, w1 * w2

    out: dict[int, float] = {}
    # planted root (degree one) sits at height 0, its child at height 1, so
    # height-`depth` vertices live depth-1 truncation levels below the child
    for shape, w in expand(depth - 1):
        degrees = np.array((1,) + shape, dtype=np.int64)
        tree = PlaneTree(degrees, validate=False)
        deep = tree.heights == depth
        if not deep.any():
            continue
        H = height_profile(tree)
        for h in H[deep]:
            out[int(h)] = out.get(int(h), 0.0) + w
    return out


@dataclass
class ChainTrajectory:
    values: np.ndarray
    pointers: np.ndarray  # 0 = D, 1 = U
    mean_value: float
    frac_down: float


def simulate(mu: OffspringDistribution, steps: int,
             rng: np.random.Generator, start: str = DOWN) -> ChainTrajectory:
    """Run the chain for `steps` i.i.d. splits starting from the given pointer."""
    c, v = sample_spine_block(mu, rng, steps)
    g = v - 1
    d = c - v
    x_down = np.minimum(g, d + 1)
    up_down = g == d + 1
    x_up = np.minimum(g, d)
    up_up = g == d
    values = np.empty(steps, dtype=np.int64)
    pointers = np.empty(steps, dtype=np.int8)
    p = 0 if start == DOWN else 1
    for k in range(steps):
        if p == 0:
            values[k] = x_down[k]
            p = 1 if up_down[k] else 0
        else:
            values[k] = x_up[k]
            p = 1 if up_up[k] else 0
        pointers[k] = p
    return ChainTrajectory(values, pointers, float(values.mean()),
                           float((pointers == 0).mean()))


def simulate_ensemble(mu: OffspringDistribution, chains: int, steps: int,
                      rng: np.random.Generator) -> np.ndarray:
    """Per-chain mean increments for an ensemble of independent chains."""
    c, v = sample_spine_block(mu, rng, chains * steps)
    g = (v - 1).reshape(steps, chains)
    d = (c - v).reshape(steps, chains)
    x_down = np.minimum(g, d + 1)
    up_down = g == d + 1
    x_up = np.minimum(g, d)
    up_up = g == d
    p = np.zeros(chains, dtype=bool)  # False = D
    total = np.zeros(chains, dtype=np.int64)
    for k in range(steps):
        total += np.where(p, x_up[k], x_down[k])
        p = np.where(p, up_up[k], up_down[k])
    return total / float(steps)


def mean_increment_stationary(mu: OffspringDistribution) -> float:
    """E[increment] under the stationary pointer law, from the step laws.

    Independent numeric route to the geodesic constant.
    """
    pi_d, pi_u = stationary(mu)
    total = 0.0
    for p, weight in ((DOWN, pi_d), (UP, pi_u)):
        for (x, _), q in joint_step_law(mu, p).items():
            total += weight * x * q
    return total
