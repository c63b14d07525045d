"""Command-line front end.

dissectree <subcommand> with shared flags --seed, --out, --format:

    constants          scaling constants and predicted first moments (JSON)
    sample-tree        conditioned Galton-Watson trees, one line per tree
    sample-dissection  Boltzmann dissections in the two-line text format
    geodesic-check     max |distance - height| slack over sampled dissections
    chain              spine-chain trajectories as CSV
    loop               loop-graph diameters as CSV
    experiment         run an ExperimentConfig JSON file
    enumerate          exhaustive small-size listings

Exit codes: 0 success, 2 invariant violation (a slack above one), 3 sampler
attempt cap exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import crt_reference
from ._graph import bit_diameter
from .dissection import (enumerate_dissections, from_tree, sample_boltzmann,
                         serialize_dissection)
from .geodesic import distance_height_slack
from .harness import ExperimentConfig, run_scaling_experiment
from .looptree import loop_graph, loopbar_graph
from .offspring import constants, from_descriptor
from .plane_tree import (ATTEMPT_CAP_DEFAULT, CapExhausted,
                         enumerate_no_unary_trees, sample_conditioned_leaves,
                         sample_conditioned_vertices, serialize_tree)
from .spine_chain import simulate

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_CAP = 3


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dist(arg: str):
    return from_descriptor(json.loads(arg))


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


def _cmd_constants(args) -> int:
    mu = _dist(args.dist)
    k = constants(mu)
    payload = {
        "c_tree": k.c_tree, "c_geo": k.c_geo, "c": k.c,
        "c_loop": k.c_loop, "c_loopbar": k.c_loopbar,
        # E[statistic] ~ value * sqrt(n); keys match experiment statistics
        "predicted_first_moments": {
            name: crt_reference.predict(mu, name, 1.0)
            for name in ("diameter", "radius", "height_u", "tree_diameter",
                         "loop_diameter", "loopbar_diameter")
        },
    }
    _write(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_sample_tree(args) -> int:
    mu = _dist(args.dist)
    rng = _rng(args.seed)
    lines = []
    for _ in range(args.samples):
        if args.leaves is not None:
            tree = sample_conditioned_leaves(mu, args.leaves, rng,
                                             args.attempt_cap)
        else:
            tree = sample_conditioned_vertices(mu, args.vertices, rng,
                                               args.attempt_cap)
        lines.append(serialize_tree(tree))
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_sample_dissection(args) -> int:
    mu = _dist(args.dist)
    rng = _rng(args.seed)
    blocks = [serialize_dissection(
        sample_boltzmann(mu, args.n, rng, args.attempt_cap))
        for _ in range(args.samples)]
    _write("\n".join(blocks) + "\n", args.out)
    return EXIT_OK


def _cmd_geodesic_check(args) -> int:
    mu = _dist(args.dist)
    rng = _rng(args.seed)
    worst = 0
    for _ in range(args.samples):
        tree = sample_conditioned_leaves(mu, args.n - 1, rng,
                                         args.attempt_cap)
        worst = max(worst, distance_height_slack(tree))
    _write(f"max slack over {args.samples} samples at n={args.n}: {worst}\n",
           args.out)
    return EXIT_OK if worst <= 1 else EXIT_INVARIANT


def _cmd_chain(args) -> int:
    mu = _dist(args.dist)
    lines = ["trial,S_n,S_n/n,occupation_D"]
    for trial in range(args.trials):
        rng = np.random.default_rng(
            np.random.SeedSequence((args.seed, trial)))
        traj = simulate(mu, args.steps, rng)
        total = int(traj.values.sum())
        lines.append(f"{trial},{total},{traj.mean_value:.12g},"
                     f"{traj.frac_down:.12g}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_loop(args) -> int:
    mu = _dist(args.dist)
    rng = _rng(args.seed)
    lines = ["sample,diameter"]
    for i in range(args.samples):
        tree = sample_conditioned_vertices(mu, args.n, rng, args.attempt_cap)
        if args.variant == "loop":
            diam = bit_diameter(loop_graph(tree))
        else:
            diam = bit_diameter(loopbar_graph(tree)[0])
        lines.append(f"{i},{diam}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        config.seed = int(args.seed)
    if args.out:
        config.output = args.out
    if args.format:
        config.format = args.format
    report = run_scaling_experiment(config)
    if not config.output:
        text = (report.csv_text() if config.format == "csv"
                else report.json_text())
        sys.stdout.write(text)
    for size, lost in sorted(report.failures.items()):
        print(f"size {size}: {lost} trial(s) hit the attempt cap",
              file=sys.stderr)
    starved = [r.n for r in report.rows if r.samples == 0]
    return EXIT_CAP if starved else EXIT_OK


def _cmd_enumerate(args) -> int:
    lines = []
    if args.leaves is not None:
        trees = enumerate_no_unary_trees(args.leaves)
        lines.append(f"{len(trees)}")
        if not args.count_only:
            lines.extend(serialize_tree(t) for t in trees)
    else:
        diss = enumerate_dissections(args.n)
        lines.append(f"{len(diss)}")
        if not args.count_only:
            lines.extend(serialize_dissection(d) for d in diss)
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, default=0,
                        help="64-bit seed for all sampling (default 0)")
    shared.add_argument("--out", help="write output to this file")
    shared.add_argument("--format", choices=("csv", "json"),
                        help="output format where applicable")
    shared.add_argument("--attempt-cap", type=int,
                        default=ATTEMPT_CAP_DEFAULT, dest="attempt_cap",
                        help="rejection-sampler attempt budget")

    top = argparse.ArgumentParser(
        prog="dissectree",
        description="Random polygon dissections, their dual trees, "
                    "spine chains, and loop graphs.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", parents=[shared],
                       help="scaling constants for an offspring law")
    p.add_argument("--dist", required=True, help="distribution descriptor JSON")
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("sample-tree", parents=[shared],
                       help="conditioned Galton-Watson trees")
    p.add_argument("--dist", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--leaves", type=int, help="condition on leaf count")
    group.add_argument("--vertices", type=int,
                       help="condition on vertex count")
    p.add_argument("--samples", type=int, default=1)
    p.set_defaults(func=_cmd_sample_tree)

    p = sub.add_parser("sample-dissection", parents=[shared],
                       help="Boltzmann dissections of an n-gon")
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True, help="polygon size")
    p.add_argument("--samples", type=int, default=1)
    p.set_defaults(func=_cmd_sample_dissection)

    p = sub.add_parser("geodesic-check", parents=[shared],
                       help="verify distance/height slack stays at most 1")
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=_cmd_geodesic_check)

    p = sub.add_parser("chain", parents=[shared],
                       help="simulate the spine exploration chain")
    p.add_argument("--dist", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.set_defaults(func=_cmd_chain)

    p = sub.add_parser("loop", parents=[shared],
                       help="loop-graph diameters of conditioned trees")
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True, help="tree vertex count")
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--variant", choices=("loop", "loopbar"), default="loop")
    p.set_defaults(func=_cmd_loop)

    p = sub.add_parser("experiment", parents=[shared],
                       help="run a config-driven scaling study")
    p.add_argument("--config", required=True, help="ExperimentConfig JSON")
    p.set_defaults(func=_cmd_experiment, seed=None)

    p = sub.add_parser("enumerate", parents=[shared],
                       help="exhaustive listings at small sizes")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=int, help="dissections of the n-gon")
    group.add_argument("--leaves", type=int,
                       help="trees without unary vertices, by leaf count")
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=_cmd_enumerate)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExhausted as exc:
        print(f"attempt cap exhausted: {exc} ({exc.attempts} attempts)",
              file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
