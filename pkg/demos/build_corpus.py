"""Rebuild the stored instance corpus under instances/.

Each instance gets a .graph file and an .oracle.json report next to it
holding every exact value the desk-scale oracles can afford: optimum
tour cost (two independent routes where both fit), cycle cover counts
of the bidirected digraph grouped by cycle count, and the matching
combinatorial bounds.  The corpus is deterministic; rerunning
overwrites in place.
"""

import json
from pathlib import Path

from regtsp import (
    bidirect,
    brute_force_optimum,
    circulant_graph,
    complete_graph,
    covers_by_cycle_count,
    cycle_cover_count_bound,
    cycle_graph,
    enumerate_cycle_covers,
    held_karp_optimum,
    hypercube_graph,
    petersen_graph,
    random_regular_graph,
    regular_subgraph,
    write_graph,
)

ROOT = Path(__file__).resolve().parents[1] / "instances"

# enumeration explores at most k^(n-1) successor choices; keep it desk-scale
ENUM_BUDGET = 2_000_000

INSTANCES = [
    ("cycle", "c3", cycle_graph(3)),
    ("cycle", "c4", cycle_graph(4)),
    ("cycle", "c5", cycle_graph(5)),
    ("cycle", "c6", cycle_graph(6)),
    ("cycle", "c8", cycle_graph(8)),
    ("cycle", "c12", cycle_graph(12)),
    ("complete", "k4", complete_graph(4)),
    ("complete", "k5", complete_graph(5)),
    ("complete", "k6", complete_graph(6)),
    ("complete", "k7", complete_graph(7)),
    ("complete", "k8", complete_graph(8)),
    ("complete", "k9", complete_graph(9)),
    ("petersen", "petersen", petersen_graph()),
    ("hypercube", "q3", hypercube_graph(3)),
    ("hypercube", "q4", hypercube_graph(4)),
    ("circulant", "circ12-1-3", circulant_graph(12, [1, 3])),
    ("random", "r10-3", random_regular_graph(10, 3, seed=0)),
    ("random", "r11-4", random_regular_graph(11, 4, seed=0)),
    ("random", "r12-4", random_regular_graph(12, 4, seed=0)),
    ("random", "r12-5", random_regular_graph(12, 5, seed=0)),
]


def cover_section(d):
    covers = enumerate_cycle_covers(d)
    by_r = covers_by_cycle_count(covers)
    k = d.regularity
    bounds = {r: cycle_cover_count_bound(d.n, k, r) for r in by_r}
    return {
        "k": k,
        "total": len(covers),
        "covers_by_r": {str(r): by_r[r] for r in sorted(by_r)},
        "bound_by_r": {str(r): bounds[r] for r in sorted(bounds)},
        "within_bounds": all(by_r[r] <= bounds[r] for r in by_r),
    }


def main():
    for family, name, g in INSTANCES:
        outdir = ROOT / family
        outdir.mkdir(parents=True, exist_ok=True)
        write_graph(g, outdir / f"{name}.graph", comment=name)
        K = g.regularity
        report = {
            "file": f"{name}.graph",
            "n": g.n,
            "m": g.m,
            "regularity": K,
            "connected": g.is_connected(),
        }
        if g.n <= 15:
            report["held_karp_optimum"] = held_karp_optimum(g)
        if g.n <= 10:
            # second, independent route to the same number
            report["brute_force_optimum"] = brute_force_optimum(g)
            assert report["brute_force_optimum"] == report["held_karp_optimum"]
        d = bidirect(g)
        if K ** (g.n - 1) <= ENUM_BUDGET:
            report["bidirected"] = cover_section(d)
        k_pow = 1 << (K.bit_length() - 1)
        if k_pow != K and k_pow ** (g.n - 1) <= ENUM_BUDGET:
            report["reduced"] = cover_section(regular_subgraph(d, k_pow))
        with open(outdir / f"{name}.oracle.json", "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        tags = [key for key in ("held_karp_optimum", "bidirected", "reduced")
                if key in report]
        print(f"{family}/{name}: n={g.n} K={K} [{', '.join(tags)}]")
    print(f"\ncorpus written to {ROOT}")


if __name__ == "__main__":
    main()
