"""Critical offspring distributions with geometric tails.

A face-degree model is encoded as a probability measure ``mu`` on the
nonnegative integers with mean exactly 1 (criticality).  In dissection mode
the weight at 1 must vanish, because an inner face of a polygon dissection
has at least three sides.  All built-in families (uniform dissections,
p-angulations, constrained face degrees) have finitely many atoms plus an
optional geometric tail ``mu[start + j*step] = first * ratio**j``, which is
what makes mass, mean, variance and parity sums computable in closed form
instead of by truncation.

Parity aggregates used throughout the chain analysis:

    even_mass      = sum of mu[2i] over i >= 0   (includes mu[0])
    even_pos_mass  = sum of mu[2i] over i >= 1
    odd_mass       = sum of mu[2i+1] over i >= 0

The scaling constants attached to a distribution are

    c_tree = 2 / (sigma * sqrt(mu0))
    c_geo  = (1/4) * (sigma^2 + mu0 * even_mass / (2*even_mass - mu0))
    c      = c_tree * c_geo
    c_loop = (2/sigma) * (1/4) * (sigma^2 + 4 - even_mass)
    c_loopbar = (2/sigma) * (1/4) * (sigma^2 + even_mass)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

__all__ = [
    "OffspringError",
    "GeometricTail",
    "OffspringDistribution",
    "ScalingConstants",
    "build_uniform_dissection",
    "build_p_angulation",
    "build_constrained",
    "build_custom",
    "normalize_to_critical",
    "constants",
    "c_geo_series",
    "tail",
    "sample_offspring",
    "sample_spine_step",
    "bisect_increasing",
]

EPS = 1e-12
_TABLE_CUTOFF = 1e-18  # tail mass left outside the sampling table


class OffspringError(ValueError):
    """Raised when offspring weights fail a structural invariant."""


def bisect_increasing(f, lo: float, hi: float, target: float, tol: float = 1e-14,
                      max_iter: int = 500) -> float:
    """Root of f(x) = target for increasing f on [lo, hi], to |residual| <= tol."""
    flo, fhi = f(lo) - target, f(hi) - target
    if flo > 0 or fhi < 0:
        raise OffspringError(f"bisection bracket invalid: f({lo})={flo + target}, f({hi})={fhi + target}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid) - target
        if abs(fm) <= tol:
            return mid
        if fm < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class GeometricTail:
    """Weights mu[start + j*step] = first * ratio**j for j = 0, 1, 2, ...

    Requires 0 <= ratio < 1, first > 0, step >= 1.  Supports exact mass,
    first and second moments, upper tail sums and parity-restricted sums.
    """

    start: int
    step: int
    first: float
    ratio: float

    def __post_init__(self):
        if not (0.0 <= self.ratio < 1.0):
            raise OffspringError(f"tail ratio must lie in [0,1): {self.ratio}")
        if self.first <= 0.0:
            raise OffspringError("tail first weight must be positive")
        if self.step < 1 or self.start < 0:
            raise OffspringError("tail start/step out of range")

    def contains(self, k: int) -> bool:
        return k >= self.start and (k - self.start) % self.step == 0

    def prob(self, k: int) -> float:
        if not self.contains(k):
            return 0.0
        return self.first * self.ratio ** ((k - self.start) // self.step)

    def mass(self) -> float:
        return self.first / (1.0 - self.ratio)

    def mean(self) -> float:
        # sum (start + j*step) w q^j
        q, w = self.ratio, self.first
        return self.start * w / (1 - q) + self.step * w * q / (1 - q) ** 2

    def second_moment(self) -> float:
        q, w, s, t = self.ratio, self.first, self.start, self.step
        s0 = w / (1 - q)
        s1 = w * q / (1 - q) ** 2
        s2 = w * q * (1 + q) / (1 - q) ** 3
        return s * s * s0 + 2 * s * t * s1 + t * t * s2

    def tail_sum(self, k: int) -> float:
        """Sum of tail weights at values >= k."""
        if k <= self.start:
            return self.mass()
        j0 = -((self.start - k) // self.step)  # ceil((k - start)/step)
        return self.first * self.ratio ** j0 / (1.0 - self.ratio)

    def parity_mass(self, parity: int) -> float:
        """Sum of tail weights at values congruent to parity mod 2."""
        q, w = self.ratio, self.first
        if self.step % 2 == 0:
            return self.mass() if self.start % 2 == parity else 0.0
        # odd step: values alternate parity with j
        even_j = w / (1.0 - q * q)       # j = 0, 2, 4, ...
        odd_j = w * q / (1.0 - q * q)    # j = 1, 3, 5, ...
        return even_j if self.start % 2 == parity else odd_j

    def entries(self, cutoff: float = _TABLE_CUTOFF) -> Iterator[tuple[int, float]]:
        """Yield (value, weight) until the remaining mass drops below cutoff."""
        k, w = self.start, self.first
        while w / (1.0 - self.ratio) > cutoff:
            yield k, w
            k += self.step
            w *= self.ratio
            if self.ratio == 0.0:
                break


@dataclass(frozen=True)
class ScalingConstants:
    c_tree: float
    c_geo: float
    c: float
    c_loop: float
    c_loopbar: float


class OffspringDistribution:
    """Critical offspring law: finite atoms plus an optional geometric tail.

    Validates on construction: nonnegative weights, total mass 1 and mean 1
    within 1e-12, weight 0 at value 1 when dissection_mode is set, and the
    parity-sum identities even_mass = mu0 + even_pos_mass and
    even_mass + odd_mass = 1.
    """

    def __init__(self, atoms: Mapping[int, float], tail: GeometricTail | None = None,
                 dissection_mode: bool = True):
        clean = {}
        for k, w in atoms.items():
            k = int(k)
            w = float(w)
            if w < 0:
                raise OffspringError(f"negative weight at {k}: {w}")
            if k < 0:
                raise OffspringError(f"negative support value {k}")
            if w > 0.0:
                if tail is not None and tail.contains(k):
                    raise OffspringError(f"atom at {k} overlaps the geometric tail")
                clean[k] = w
        self.atoms: dict[int, float] = dict(sorted(clean.items()))
        self.tail = tail
        self.dissection_mode = bool(dissection_mode)
        self._tables: dict[str, tuple[np.ndarray, np.ndarray]] = {}

        am = sum(self.atoms.values())
        a1 = sum(k * w for k, w in self.atoms.items())
        a2 = sum(k * k * w for k, w in self.atoms.items())
        ae = [sum(w for k, w in self.atoms.items() if k % 2 == p) for p in (0, 1)]
        if tail is not None:
            self.mass = am + tail.mass()
            self.mean = a1 + tail.mean()
            m2 = a2 + tail.second_moment()
            self.even_mass = ae[0] + tail.parity_mass(0)
            self.odd_mass = ae[1] + tail.parity_mass(1)
        else:
            self.mass = am
            self.mean = a1
            m2 = a2
            self.even_mass = ae[0]
            self.odd_mass = ae[1]
        self.mu0 = self.prob(0)
        self.even_pos_mass = self.even_mass - self.mu0
        self.variance = m2 - self.mean ** 2
        self.sigma = math.sqrt(max(self.variance, 0.0))
        self.validate()

    # -- structure ---------------------------------------------------------

    def validate(self) -> None:
        if abs(self.mass - 1.0) > EPS:
            raise OffspringError(f"total mass {self.mass!r} != 1")
        if abs(self.mean - 1.0) > EPS:
            raise OffspringError(f"mean {self.mean!r} != 1 (not critical)")
        if self.dissection_mode and self.prob(1) > 0.0:
            raise OffspringError("dissection mode forbids weight at 1")
        if self.mu0 <= 0.0:
            raise OffspringError("weight at 0 must be positive")
        if self.variance <= 0.0:
            raise OffspringError("variance must be positive")
        if abs(self.even_mass - (self.mu0 + self.even_pos_mass)) > EPS:
            raise OffspringError("parity bookkeeping broken")
        if abs((self.even_mass + self.odd_mass) - 1.0) > EPS:
            raise OffspringError("parity masses do not sum to 1")

    def prob(self, k: int) -> float:
        if k in self.atoms:
            return self.atoms[k]
        if self.tail is not None:
            return self.tail.prob(k)
        return 0.0

    def tail_sum(self, k: int) -> float:
        """mubar_k = sum of mu[i] for i >= k.  Closed form; tail_sum(0) = 1."""
        s = sum(w for a, w in self.atoms.items() if a >= k)
        if self.tail is not None:
            s += self.tail.tail_sum(k)
        return s

    @property
    def finite_support(self) -> bool:
        return self.tail is None

    def support(self) -> list[int]:
        if not self.finite_support:
            raise OffspringError("infinite support")
        return sorted(self.atoms)

    def max_support(self) -> int:
        if not self.finite_support:
            raise OffspringError("infinite support")
        return max(self.atoms)

    def entries(self, cutoff: float = _TABLE_CUTOFF) -> Iterator[tuple[int, float]]:
        """All weights in increasing value order, tail truncated below cutoff."""
        ts = self.tail.entries(cutoff) if self.tail is not None else iter(())
        pending = next(ts, None)
        for k, w in self.atoms.items():
            while pending is not None and pending[0] < k:
                yield pending
                pending = next(ts, None)
            yield k, w
        while pending is not None:
            yield pending
            pending = next(ts, None)

    # -- serialization -----------------------------------------------------

    def to_descriptor(self) -> dict:
        d: dict = {"kind": "custom", "weights": {str(k): w for k, w in self.atoms.items()}}
        if self.tail is not None:
            d["tail"] = {"start": self.tail.start, "step": self.tail.step,
                         "first": self.tail.first, "ratio": self.tail.ratio}
        d["dissection_mode"] = self.dissection_mode
        return d

    def __repr__(self) -> str:
        t = f", tail={self.tail}" if self.tail is not None else ""
        return f"OffspringDistribution({self.atoms}{t})"

    # -- sampling tables ---------------------------------------------------

    def _table(self, which: str) -> tuple[np.ndarray, np.ndarray]:
        """(support, cdf) arrays for 'mu' or size-biased 'mu_star'; cdf[-1] = 1."""
        tab = self._tables.get(which)
        if tab is not None:
            return tab
        vals, probs = [], []
        for k, w in self.entries(_TABLE_CUTOFF):
            p = k * w if which == "mu_star" else w
            if p > 0.0:
                vals.append(k)
                probs.append(p)
        support = np.asarray(vals, dtype=np.int64)
        cdf = np.cumsum(np.asarray(probs, dtype=np.float64))
        # Saturate: whatever sliver of tail mass lies beyond the table is
        # folded onto the last entry (total below _TABLE_CUTOFF by design).
        cdf[-1] = 1.0
        tab = (support, cdf)
        self._tables[which] = tab
        return tab

    def sample_block(self, rng: np.random.Generator, size: int,
                     which: str = "mu") -> np.ndarray:
        """Vectorized inverse-CDF draws from mu (or the size-biased law)."""
        support, cdf = self._table(which)
        u = rng.random(size)
        idx = np.searchsorted(cdf, u, side="right")
        return support[idx]


# -- builders ---------------------------------------------------------------

def build_uniform_dissection() -> OffspringDistribution:
    """Weights making every dissection of a fixed polygon equally likely.

    mu0 = 2 - sqrt(2) and mu_i = ((2 - sqrt(2))/2)**(i-1) for i >= 2.
    """
    r = (2.0 - math.sqrt(2.0)) / 2.0
    return OffspringDistribution({0: 2.0 - math.sqrt(2.0)},
                                 GeometricTail(start=2, step=1, first=r, ratio=r))


def build_p_angulation(p: int) -> OffspringDistribution:
    """All inner faces have degree p (p >= 3): mu0 = 1 - 1/(p-1), mu_{p-1} = 1/(p-1)."""
    if p < 3:
        raise OffspringError(f"p-angulation needs p >= 3, got {p}")
    w = 1.0 / (p - 1)
    return OffspringDistribution({0: 1.0 - w, p - 1: w})


def _degree_set_params(A) -> tuple[list[int], tuple[int, int] | None]:
    """Normalize a face-degree constraint into (finite list, progression).

    A is either an iterable of integers >= 3, or a mapping with keys
    offset/step/unbounded describing {offset, offset+step, ...}.
    """
    if isinstance(A, Mapping):
        off, stp = int(A["offset"]), int(A["step"])
        if not A.get("unbounded", False):
            raise OffspringError("bounded progressions should be passed as explicit sets")
        if off < 3 or stp < 1:
            raise OffspringError(f"degree progression out of range: {A}")
        return [], (off, stp)
    degs = sorted(set(int(a) for a in A))
    if not degs or degs[0] < 3:
        raise OffspringError(f"face degrees must be >= 3: {A}")
    return degs, None


def build_constrained(A) -> OffspringDistribution:
    """Critical law supported on {a-1 : a in A} for a face-degree set A.

    Solves sum_{i in A-1} i * r**(i-1) = 1 for r by bisection (residual
    <= 1e-14), then nu_i = r**(i-1) on A-1 and nu_0 = 1 - sum nu_i.
    """
    degs, prog = _degree_set_params(A)
    if prog is None:
        offs = [a - 1 for a in degs]

        def deriv(r: float) -> float:
            return sum(i * r ** (i - 1) for i in offs)

        r = bisect_increasing(deriv, 0.0, 1.0, 1.0)
        atoms = {0: 1.0 - sum(r ** (i - 1) for i in offs)}
        for i in offs:
            atoms[i] = r ** (i - 1)
        return OffspringDistribution(atoms)

    off, stp = prog
    a0 = off - 1  # smallest offspring value

    def deriv(r: float) -> float:
        u = r ** stp
        return r ** (a0 - 1) * (a0 / (1 - u) + stp * u / (1 - u) ** 2)

    r = bisect_increasing(deriv, 0.0, 1.0 - 1e-14, 1.0)
    first = r ** (a0 - 1)
    t = GeometricTail(start=a0, step=stp, first=first, ratio=r ** stp)
    return OffspringDistribution({0: 1.0 - t.mass()}, t)


def build_custom(atoms: Mapping[int, float], tail: GeometricTail | None = None,
                 dissection_mode: bool | None = None) -> OffspringDistribution:
    """Wrap explicit critical weights, inferring dissection mode if unspecified."""
    if dissection_mode is None:
        has_one = atoms.get(1, 0.0) > 0.0 or (tail is not None and tail.contains(1))
        dissection_mode = not has_one
    return OffspringDistribution(atoms, tail, dissection_mode)


def normalize_to_critical(weights: Mapping[int, float],
                          tail: GeometricTail | None = None) -> OffspringDistribution:
    """Tilt nonnegative weights on {2, 3, ...} into a critical offspring law.

    Finds lam with sum_i i * lam**(i-1) * w_i = 1, then nu_i = lam**(i-1) w_i
    and nu_0 = 1 - sum nu_i.  Weights may carry a geometric tail descriptor;
    the tilted tail stays geometric with ratio = tail.ratio * lam**tail.step.
    """
    ws = {int(k): float(v) for k, v in weights.items() if float(v) > 0.0}
    for k in ws:
        if k < 2:
            raise OffspringError(f"weights must live on {{2,3,...}}, got {k}")
    if tail is not None and tail.start < 2:
        raise OffspringError("weight tail must start at 2 or above")
    if not ws and tail is None:
        raise OffspringError("no weights given")

    def deriv(lam: float) -> float:
        s = sum(k * lam ** (k - 1) * w for k, w in ws.items())
        if tail is not None:
            u = tail.ratio * lam ** tail.step
            if u >= 1.0:
                return math.inf
            s += tail.first * lam ** (tail.start - 1) * (
                tail.start / (1 - u) + tail.step * u / (1 - u) ** 2)
        return s

    # bracket: deriv is increasing from 0; expand until it clears 1
    hi = 1.0
    if tail is not None and tail.ratio > 0.0:
        hi = min(hi, tail.ratio ** (-1.0 / tail.step))
        while deriv(hi * (1 - 1e-13)) < 1.0:
            # diverges at the radius of convergence, so this cannot loop
            hi *= 1.0 - 1e-13  # pragma: no cover
        lam = bisect_increasing(deriv, 0.0, hi * (1 - 1e-13), 1.0)
    else:
        while deriv(hi) < 1.0:
            hi *= 2.0
            if hi > 1e9:
                raise OffspringError("weights cannot be normalized to criticality")
        lam = bisect_increasing(deriv, 0.0, hi, 1.0)

    atoms = {k: lam ** (k - 1) * w for k, w in ws.items()}
    new_tail = None
    if tail is not None:
        new_tail = GeometricTail(start=tail.start, step=tail.step,
                                 first=tail.first * lam ** (tail.start - 1),
                                 ratio=tail.ratio * lam ** tail.step)
        atoms[0] = 1.0 - sum(atoms.values()) - new_tail.mass()
    else:
        atoms[0] = 1.0 - sum(atoms.values())
    return OffspringDistribution(atoms, new_tail)


# -- descriptor parsing ------------------------------------------------------

def from_descriptor(d: Mapping) -> OffspringDistribution:
    """Build a distribution from its JSON descriptor.

    kinds: uniform_dissection | p_angulation (p) | constrained (A) | custom
    (weights, optional tail).  Custom weights containing an atom at 0 or 1
    are taken verbatim as a critical law; weights living entirely on
    {2, 3, ...} are normalized to criticality.
    """
    kind = d["kind"]
    if kind == "uniform_dissection":
        return build_uniform_dissection()
    if kind == "p_angulation":
        return build_p_angulation(int(d["p"]))
    if kind == "constrained":
        A = d["A"]
        if "set" in A:
            return build_constrained(A["set"])
        return build_constrained(A["progression"])
    if kind == "custom":
        weights = {int(k): float(v) for k, v in d.get("weights", {}).items()}
        tail = None
        if "tail" in d and d["tail"] is not None:
            t = d["tail"]
            tail = GeometricTail(start=int(t["start"]), step=int(t["step"]),
                                 first=float(t["first"]), ratio=float(t["ratio"]))
        full = any(k <= 1 for k in weights) or (tail is not None and tail.start <= 1)
        if full:
            return build_custom(weights, tail, d.get("dissection_mode"))
        return normalize_to_critical(weights, tail)
    raise OffspringError(f"unknown distribution kind {kind!r}")


# -- constants ---------------------------------------------------------------

def constants(mu: OffspringDistribution) -> ScalingConstants:
    """Scaling constants attached to a critical offspring law."""
    sigma = mu.sigma
    c_tree = 2.0 / (sigma * math.sqrt(mu.mu0))
    c_geo = 0.25 * (mu.variance + mu.mu0 * mu.even_mass / (2.0 * mu.even_mass - mu.mu0))
    c_loop = (2.0 / sigma) * 0.25 * (mu.variance + 4.0 - mu.even_mass)
    c_loopbar = (2.0 / sigma) * 0.25 * (mu.variance + mu.even_mass)
    return ScalingConstants(c_tree=c_tree, c_geo=c_geo, c=c_tree * c_geo,
                            c_loop=c_loop, c_loopbar=c_loopbar)


def stationary_position_law(mu: OffspringDistribution) -> tuple[float, float]:
    """Stationary law (pi_D, pi_U) of the descend/up position process.

    pi_D = even_mass / (even_mass + even_pos_mass); degenerates to (1, 0)
    when the distribution has no positive even weights.
    """
    if mu.even_pos_mass <= 0.0:
        return (1.0, 0.0)
    z = mu.even_mass + mu.even_pos_mass
    return (mu.even_mass / z, mu.even_pos_mass / z)


def c_geo_series(mu: OffspringDistribution, tol: float = 1e-12) -> float:
    """Mean one-step displacement under the stationary position law.

    Sums i * P(X = i | position) weighted by (pi_D, pi_U).  The summands
    involve upper tail sums, so the series is cut once a certified bound on
    the remainder falls below tol.
    """
    pi_d, pi_u = stationary_position_law(mu)
    total = 0.0
    i = 1
    while True:
        m1 = mu.tail_sum(2 * i + 1)
        from_d = m1 + m1 + mu.prob(2 * i)
        from_u = 2.0 * mu.tail_sum(2 * i + 2) + mu.prob(2 * i + 1)
        total += i * (pi_d * from_d + pi_u * from_u)
        # everything at indices > i is dominated by 5 * tail_sum(2i) per index,
        # and tail sums beyond the atoms decay geometrically
        rem = mu.tail_sum(2 * i)
        if mu.finite_support:
            if 2 * i > mu.max_support():
                break
        else:
            ratio = mu.tail.ratio ** (2.0 / mu.tail.step)
            if 5.0 * (i + 1) * rem / max(1.0 - ratio, 1e-9) < tol and i > 4:
                break
        i += 1
        if i > 10_000_000:  # pragma: no cover
            raise OffspringError("series did not converge")
    return total


def tail(mu: OffspringDistribution, k: int) -> float:
    """Upper tail sum of mu at k (module-level alias for tail_sum)."""
    return mu.tail_sum(k)


# -- scalar sampling ---------------------------------------------------------

def sample_offspring(mu: OffspringDistribution, rng: np.random.Generator) -> int:
    """One draw from mu by inverse CDF."""
    return int(mu.sample_block(rng, 1)[0])


def sample_spine_step(mu: OffspringDistribution, rng: np.random.Generator) -> tuple[int, int]:
    """One spine step: child count C from the size-biased law k*mu_k, then
    a uniform child position V in {1, ..., C}."""
    c = int(mu.sample_block(rng, 1, which="mu_star")[0])
    v = int(rng.integers(1, c + 1))
    return c, v


def sample_spine_block(mu: OffspringDistribution, rng: np.random.Generator,
                       size: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized spine steps: arrays (C, V) with V uniform on {1..C}."""
    c = mu.sample_block(rng, size, which="mu_star")
    v = rng.integers(1, c + 1)
    return c, v
