#!/usr/bin/env python3
"""Sweep random DAGs and hold every frontier query to the relation oracle.

Prints per-operator mismatch counts (all zeros, or something is wrong) and
rough timing for the direct vs. dual routes, which is the small-scale
version of the benchmark's direction check.
"""

import argparse
import os
import random
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from lineal import queries
from lineal.graph import DepGraph, io_relation


def random_dag(rng: random.Random, max_vertices: int) -> DepGraph:
    n = rng.randint(1, max_vertices)
    density = rng.uniform(0.1, 0.5)
    edges = [
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density
    ]
    return DepGraph.from_edges(edges, vertices=range(n))


def selections(universe, cap=6):
    if len(universe) <= cap:
        return list(queries._subsets(universe))
    return [frozenset({v}) for v in sorted(universe)]


OPS = ("demandedBy", "suffices", "demands", "dualPreimage")
DUALS = {
    "demandedBy": queries.demanded_by_via_dual,
    "suffices": queries.suffices_via_dual,
    "demands": queries.demands_via_dual,
    "dualPreimage": queries.only_needed_for_via_dual,
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graphs", type=int, default=1000)
    ap.add_argument("--max-vertices", type=int, default=12)
    ap.add_argument("--seed", type=int, default=20240811)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    mismatches = {op: 0 for op in OPS}
    dual_mismatches = {op: 0 for op in OPS}
    checked = 0
    t_direct = t_dual = 0.0

    for _ in range(args.graphs):
        g = random_dag(rng, args.max_vertices)
        for op in OPS:
            universe = g.sources() if op in ("demandedBy", "suffices") else g.sinks()
            for sel in selections(universe):
                checked += 1
                t0 = time.perf_counter()
                fast = queries.run_query(g, op, sel)
                t_direct += time.perf_counter() - t0
                if fast != queries.oracle_query(g, op, sel):
                    mismatches[op] += 1
                t0 = time.perf_counter()
                dual = DUALS[op](g, sel)
                t_dual += time.perf_counter() - t0
                if dual != fast:
                    dual_mismatches[op] += 1

    print(f"graphs: {args.graphs}   selections checked: {checked}")
    for op in OPS:
        print(
            f"  {op:<14} oracle mismatches: {mismatches[op]:>3}   "
            f"dual-route mismatches: {dual_mismatches[op]:>3}"
        )
    print(f"direct total: {t_direct * 1000:.1f} ms   dual total: {t_dual * 1000:.1f} ms")
    return 1 if any(mismatches.values()) or any(dual_mismatches.values()) else 0


if __name__ == "__main__":
    sys.exit(main())
