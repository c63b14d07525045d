"""Print the scaling-constant table for the bundled example laws.

For each offspring law the table lists the tree constant, the geodesic
constant (closed form and the independent tail-sum series route), the
product constant that rescales graph distances, and the two loop-graph
constants.  A nonzero gap column would flag a disagreement between the
closed form and the series; at criticality the two agree to 1e-12.

Usage:
    python scripts/constants_table.py
    python scripts/constants_table.py --dist '{"kind": "p_angulation", "p": 5}'
"""

import argparse
import json

from dissectree import c_geo_series, constants, from_descriptor

EXAMPLE_DESCRIPTORS = {
    "tri": {"kind": "p_angulation", "p": 3},
    "quad": {"kind": "p_angulation", "p": 4},
    "penta": {"kind": "p_angulation", "p": 5},
    "uniform": {"kind": "uniform_dissection"},
    "even": {"kind": "constrained",
             "A": {"progression": {"offset": 4, "step": 2,
                                   "unbounded": True}}},
    "odd": {"kind": "constrained",
            "A": {"progression": {"offset": 3, "step": 2,
                                  "unbounded": True}}},
}


def row(name: str, descriptor: dict) -> str:
    mu = from_descriptor(descriptor)
    k = constants(mu)
    gap = abs(c_geo_series(mu) - k.c_geo)
    return (f"{name:>10}  {k.c_tree:12.9f}  {k.c_geo:12.9f}  {k.c:12.9f}  "
            f"{k.c_loop:12.9f}  {k.c_loopbar:12.9f}  {gap:8.1e}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dist", action="append", default=[],
                        help="extra distribution descriptor JSON "
                             "(repeatable)")
    args = parser.parse_args()

    header = (f"{'law':>10}  {'c_tree':>12}  {'c_geo':>12}  {'c':>12}  "
              f"{'c_loop':>12}  {'c_loopbar':>12}  {'series':>8}")
    print(header)
    print("-" * len(header))
    for name, descriptor in EXAMPLE_DESCRIPTORS.items():
        print(row(name, descriptor))
    for j, text in enumerate(args.dist):
        print(row(f"extra{j}", json.loads(text)))


if __name__ == "__main__":
    main()
