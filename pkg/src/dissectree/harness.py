"""Experiment orchestration and diagnostics.

run_scaling_experiment drives seeded Monte Carlo studies over a list of
sizes: it samples conditioned objects, evaluates the requested statistics,
and aggregates them into rows carrying the matching continuum prediction.
Reports serialize to CSV (header ``n,statistic,p,mean,stderr,samples,
predicted,ratio``) and to a JSON mirror with the same keys; optionally the
raw per-sample values go to a second CSV so the stderr column can be
recomputed offline.

Reproducibility contract: every trial draws from its own generator seeded
by (seed, size index, trial index, purpose), so the emitted bytes depend
only on the config, never on the worker count.  Aggregation always walks
trials in index order.

Also here: correspondence distortion (an upper bound oracle for
Gromov-Hausdorff comparisons), the normalized deviation between polygon
distances and rescaled leaf distances on the dual tree, the
nearest-descendant-leaf depth bound, and the rejection-rate probe for the
leaf-conditioned sampler.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import crt_reference
from ._graph import bit_diameter, bit_distance_matrix
from .dissection import Dissection, from_tree
from .geodesic import distance_height_slack
from .looptree import loop_graph, loopbar_graph
from .offspring import OffspringDistribution, constants, from_descriptor
from .plane_tree import (ATTEMPT_CAP_DEFAULT, CapExhausted, PlaneTree,
                         PlantedTree, TreeSampler, plant,
                         sample_conditioned_leaves,
                         sample_conditioned_vertices)

__all__ = [
    "DEVIATION_P95_THRESHOLD",
    "DISSECTION_STATISTICS",
    "LOOP_STATISTICS",
    "StatRequest",
    "ExperimentConfig",
    "StatRow",
    "ExperimentReport",
    "run_scaling_experiment",
    "distortion",
    "leaf_metric",
    "leaf_deviation_statistic",
    "leaf_proximity",
    "ProbeResult",
    "acceptance_probe",
]

# Calibrated bound on the 95th percentile of leaf_deviation_statistic over
# uniform-law dissections of 1000-gons (100 samples).  An artifact of finite
# size, not a limit value; recalibrate if the statistic's definition moves.
DEVIATION_P95_THRESHOLD = 0.35

# Statistics measured on a Boltzmann dissection of an n-gon (dual tree
# conditioned to n-1 leaves):
#   diameter      max graph distance between polygon vertices
#   radius        max graph distance from polygon vertex 0
#   height_u      graph distance from vertex 0 to a uniformly drawn vertex
#   tree_diameter diameter of the dual tree
#   height_slack  max |distance from 0 - exploration height| over targets
#   leaf_deviation  normalized worst gap between polygon distances and
#                   c_geo-rescaled leaf distances (see leaf_deviation_statistic)
DISSECTION_STATISTICS = ("diameter", "radius", "height_u", "tree_diameter",
                         "height_slack", "leaf_deviation")
# Statistics measured on the loop graphs of a tree conditioned to n vertices.
LOOP_STATISTICS = ("loop_diameter", "loopbar_diameter")

# Statistics with a continuum prediction (others leave predicted/ratio blank).
_PREDICTABLE = ("diameter", "radius", "height_u", "tree_diameter",
                "loop_diameter", "loopbar_diameter")


@dataclass(frozen=True)
class StatRequest:
    """One requested statistic; the report row carries E[value^p]."""
    name: str
    p: float = 1.0


@dataclass
class ExperimentConfig:
    """Declarative description of a scaling study.

    distribution: offspring-law descriptor (see offspring.from_descriptor).
    sizes: polygon sizes (dissection statistics) or vertex counts (loop
    statistics); samples: trials per size; statistics: names or
    {"name":..., "p":...} entries; epsilon: reported alongside deviation
    diagnostics; output/sample_output: optional file targets.
    """
    distribution: dict
    sizes: tuple
    samples: int
    statistics: tuple
    seed: int = 0
    epsilon: float | None = None
    workers: int = 1
    output: str | None = None
    format: str = "csv"
    sample_output: str | None = None
    attempt_cap: int = ATTEMPT_CAP_DEFAULT

    def __post_init__(self):
        self.sizes = tuple(int(n) for n in self.sizes)
        reqs = []
        for s in self.statistics:
            if isinstance(s, StatRequest):
                reqs.append(s)
            elif isinstance(s, str):
                reqs.append(StatRequest(s))
            else:
                reqs.append(StatRequest(str(s["name"]), float(s.get("p", 1.0))))
        self.statistics = tuple(reqs)
        self.validate()

    def validate(self) -> None:
        if not self.sizes:
            raise ValueError("config needs at least one size")
        if min(self.sizes) < 3:
            raise ValueError("sizes must be >= 3")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not self.statistics:
            raise ValueError("config needs at least one statistic")
        known = set(DISSECTION_STATISTICS) | set(LOOP_STATISTICS)
        for req in self.statistics:
            if req.name not in known:
                raise ValueError(f"unknown statistic {req.name!r}; "
                                 f"expected one of {sorted(known)}")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        return ExperimentConfig(
            distribution=d["distribution"],
            sizes=d["sizes"],
            samples=int(d["samples"]),
            statistics=d["statistics"],
            seed=int(d.get("seed", 0)),
            epsilon=d.get("epsilon"),
            workers=int(d.get("workers", 1)),
            output=d.get("output"),
            format=d.get("format", "csv"),
            sample_output=d.get("sample_output"),
            attempt_cap=int(d.get("attempt_cap", ATTEMPT_CAP_DEFAULT)),
        )

    @staticmethod
    def from_json(path: str) -> "ExperimentConfig":
        with open(path) as fh:
            return ExperimentConfig.from_dict(json.load(fh))


@dataclass(frozen=True)
class StatRow:
    n: int
    statistic: str
    p: float
    mean: float
    stderr: float
    samples: int
    predicted: float | None
    ratio: float | None


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{x:.12g}"


@dataclass
class ExperimentReport:
    rows: list
    failures: dict              # size -> trials lost to cap exhaustion
    sample_rows: list           # (n, statistic, p, trial, value)
    config: ExperimentConfig

    def csv_text(self) -> str:
        lines = ["n,statistic,p,mean,stderr,samples,predicted,ratio"]
        for r in self.rows:
            lines.append(f"{r.n},{r.statistic},{_fmt(r.p)},{_fmt(r.mean)},"
                         f"{_fmt(r.stderr)},{r.samples},{_fmt(r.predicted)},"
                         f"{_fmt(r.ratio)}")
        return "\n".join(lines) + "\n"

    def json_text(self) -> str:
        payload = {
            "rows": [{"n": r.n, "statistic": r.statistic, "p": r.p,
                      "mean": r.mean, "stderr": r.stderr,
                      "samples": r.samples, "predicted": r.predicted,
                      "ratio": r.ratio} for r in self.rows],
            "failures": {str(k): v for k, v in sorted(self.failures.items())},
            "metadata": {
                "seed": self.config.seed,
                "distribution": self.config.distribution,
                "epsilon": self.config.epsilon,
                "deviation_threshold": DEVIATION_P95_THRESHOLD,
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def sample_csv_text(self) -> str:
        lines = ["n,statistic,p,trial,value"]
        for n, name, p, trial, value in self.sample_rows:
            lines.append(f"{n},{name},{_fmt(p)},{trial},{_fmt(value)}")
        return "\n".join(lines) + "\n"

    def values(self, n: int, statistic: str) -> np.ndarray:
        return np.array([v for (m, name, _p, _t, v) in self.sample_rows
                         if m == n and name == statistic])


def _trial_worker(mu, cfg, size_idx, size, trial, diss_names, loop_names,
                  c_geo):
    """Raw statistic values for one trial; None marks a cap-exhausted part."""
    out = {}
    if diss_names:
        rng = np.random.default_rng(
            np.random.SeedSequence((cfg.seed, size_idx, trial, 0)))
        try:
            tree = sample_conditioned_leaves(mu, size - 1, rng,
                                             cfg.attempt_cap)
        except CapExhausted:
            tree = None
        if tree is not None:
            diss = from_tree(tree)
            if "diameter" in diss_names:
                out["diameter"] = diss.diameter()
            if "radius" in diss_names:
                out["radius"] = diss.radius()
            if "height_u" in diss_names:
                rng_stat = np.random.default_rng(
                    np.random.SeedSequence((cfg.seed, size_idx, trial, 1)))
                target = int(rng_stat.integers(size))
                out["height_u"] = int(diss.distances_from(0)[target])
            if "tree_diameter" in diss_names:
                out["tree_diameter"] = tree.diameter()
            if "height_slack" in diss_names:
                out["height_slack"] = distance_height_slack(tree)
            if "leaf_deviation" in diss_names:
                out["leaf_deviation"] = leaf_deviation_statistic(
                    diss, plant(tree), c_geo)
    if loop_names:
        rng = np.random.default_rng(
            np.random.SeedSequence((cfg.seed, size_idx, trial, 2)))
        try:
            tree = sample_conditioned_vertices(mu, size, rng, cfg.attempt_cap)
        except CapExhausted:
            tree = None
        if tree is not None:
            if "loop_diameter" in loop_names:
                out["loop_diameter"] = bit_diameter(loop_graph(tree))
            if "loopbar_diameter" in loop_names:
                out["loopbar_diameter"] = bit_diameter(loopbar_graph(tree)[0])
    return out


def run_scaling_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Execute the study described by config and return its report.

    Cap-exhausted trials are dropped from the aggregates and counted in
    report.failures; the run itself continues.  Files named in the config
    (output, sample_output) are written before returning.
    """
    mu = from_descriptor(config.distribution)
    names = [req.name for req in config.statistics]
    diss_names = frozenset(n for n in names if n in DISSECTION_STATISTICS)
    loop_names = frozenset(n for n in names if n in LOOP_STATISTICS)
    c_geo = constants(mu).c_geo if "leaf_deviation" in diss_names else None

    rows, sample_rows, failures = [], [], {}
    for size_idx, size in enumerate(config.sizes):
        def job(trial, _idx=size_idx, _size=size):
            return _trial_worker(mu, config, _idx, _size, trial,
                                 diss_names, loop_names, c_geo)

        if config.workers == 1:
            results = [job(t) for t in range(config.samples)]
        else:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                results = list(pool.map(job, range(config.samples)))

        lost = sum(1 for r in results
                   if len(r) < len(diss_names) + len(loop_names))
        if lost:
            failures[size] = lost

        for req in config.statistics:
            pairs = [(t, r[req.name]) for t, r in enumerate(results)
                     if req.name in r]
            powered = np.array([float(v) ** req.p for _, v in pairs])
            for (t, _), pv in zip(pairs, powered):
                sample_rows.append((size, req.name, req.p, t, float(pv)))
            count = powered.size
            mean = float(powered.mean()) if count else math.nan
            stderr = (float(powered.std(ddof=1)) / math.sqrt(count)
                      if count > 1 else 0.0)
            predicted = ratio = None
            if req.name in _PREDICTABLE:
                predicted = (crt_reference.predict(mu, req.name, req.p)
                             * size ** (req.p / 2.0))
                ratio = mean / predicted if count else None
            rows.append(StatRow(size, req.name, req.p, mean, stderr, count,
                                predicted, ratio))

    report = ExperimentReport(rows, failures, sample_rows, config)
    if config.output:
        text = report.csv_text() if config.format == "csv" else report.json_text()
        with open(config.output, "w") as fh:
            fh.write(text)
    if config.sample_output:
        with open(config.sample_output, "w") as fh:
            fh.write(report.sample_csv_text())
    return report


# -- correspondence diagnostics ----------------------------------------------

def distortion(pairs, dist_a: np.ndarray, dist_b: np.ndarray,
               points_a=None, points_b=None) -> float:
    """Distortion of a correspondence between two finite metric spaces.

    pairs is a list of (a, b) index pairs; dist_a and dist_b are square
    distance matrices.  Returns max |dist_a[a,a'] - dist_b[b,b']| over all
    pairs of pairs; half of it bounds the Gromov-Hausdorff distance from
    above.  When points_a/points_b are given, every listed point must occur
    in the correspondence (the first uncovered point is reported).
    """
    if not len(pairs):
        raise ValueError("empty correspondence")
    xa = np.asarray([p[0] for p in pairs], dtype=np.intp)
    xb = np.asarray([p[1] for p in pairs], dtype=np.intp)
    if points_a is not None:
        missing = set(int(p) for p in points_a) - set(xa.tolist())
        if missing:
            raise ValueError(f"correspondence misses point {min(missing)} "
                             "of the first space")
    if points_b is not None:
        missing = set(int(p) for p in points_b) - set(xb.tolist())
        if missing:
            raise ValueError(f"correspondence misses point {min(missing)} "
                             "of the second space")
    da = np.asarray(dist_a, dtype=np.float64)[np.ix_(xa, xa)]
    db = np.asarray(dist_b, dtype=np.float64)[np.ix_(xb, xb)]
    return float(np.abs(da - db).max())


def leaf_metric(tree: PlaneTree) -> np.ndarray:
    """All-pairs graph distances between the leaves, in leaf order."""
    leaves = tree.leaves
    if isinstance(tree, PlantedTree):
        leaves = tree.planted_leaves
    return bit_distance_matrix(tree.graph(), sources=leaves)[leaves, :]


def leaf_deviation_statistic(diss: Dissection, planted: PlantedTree,
                             scale: float) -> float:
    """Smallest epsilon at which polygon and rescaled leaf metrics separate.

    Computes max over all pairs (j, k) of |d_D(j, k) - scale * d_tree(l_j,
    l_k)| / max(Diam(tree), sqrt(n)), matching polygon vertex k with the
    k-th leaf of the planted dual tree (the planted leaf is vertex 0).
    """
    lv = planted.planted_leaves
    tree_dist = bit_distance_matrix(planted.graph(), sources=lv)[lv, :]
    diss_dist = diss.distance_matrix()
    denom = max(planted.diameter(), math.sqrt(diss.n))
    gap = np.abs(diss_dist.astype(np.float64) - scale * tree_dist)
    return float(gap.max() / denom)


def leaf_proximity(tree: PlaneTree) -> int:
    """Largest distance from any vertex to its nearest descendant leaf.

    In a tree without unary vertices this never exceeds log2(vertex count):
    descending into a smallest child subtree at least halves the remaining
    subtree size at every step.
    """
    n = tree.n
    best = np.where(tree.degrees == 0, 0, n).astype(np.int64)
    parent = tree.parent
    for v in range(n - 1, 0, -1):
        cand = best[v] + 1
        p = parent[v]
        if cand < best[p]:
            best[p] = cand
    return int(best.max())


# -- sampler acceptance probe -------------------------------------------------

@dataclass(frozen=True)
class ProbeResult:
    successes: int
    attempts: int
    observed: float
    predicted: float
    ratio: float
    ci_low: float
    ci_high: float


def acceptance_probe(mu: OffspringDistribution, n: int, attempts: int,
                     rng: np.random.Generator) -> ProbeResult:
    """Empirical acceptance rate of the (n-1)-leaf rejection sampler.

    Runs exactly `attempts` attempts and compares the success fraction to
    sqrt(mu_0 / (2 pi sigma^2)) * n^{-3/2}; the interval is a 95% normal
    approximation for the observed rate.
    """
    # Probe attempts are short and oversized cuts are frequent, and every cut
    # re-parses one chunk-sized window; a small chunk keeps that cheap while
    # the large block amortizes generator calls.
    sampler = TreeSampler(mu, rng, block=1 << 17, chunk=1 << 11)
    successes = sampler.probe_leaves(n - 1, attempts)
    if successes == 0:
        raise RuntimeError(f"no acceptances in {attempts} attempts at n={n}")
    observed = successes / attempts
    predicted = math.sqrt(mu.mu0 / (2.0 * math.pi)) / mu.sigma * n ** -1.5
    half = 1.959963984540054 * math.sqrt(observed * (1.0 - observed)
                                         / attempts)
    return ProbeResult(successes=successes, attempts=attempts,
                       observed=observed, predicted=predicted,
                       ratio=observed / predicted,
                       ci_low=(observed - half) / predicted,
                       ci_high=(observed + half) / predicted)
