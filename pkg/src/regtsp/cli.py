"""Command-line surface: gen, tour, verify, bench, oracle.

Exit codes are part of the contract: 0 success, 1 verification
failure, 2 input or parameter error, 3 structural precondition failure
(irregular or disconnected input where the pipelines need otherwise).
``--json`` switches every command's stdout to machine-readable JSON.

Tour files are canonical single-line JSON and omit wall-clock timing
unless asked (--timing), so a fixed (instance, algo, seed) writes
byte-identical output on every run.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import statistics
import sys
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import GraphFormatError, StructureError
from .generators import NAMED_FAMILIES, named_graph, random_regular_graph
from .graphs import Graph, bidirect, format_graph, read_graph, write_graph
from .longcycles import cycle_length_threshold, deterministic_tsp
from .oracles import (
    brute_force_optimum,
    coloring_distribution_check,
    coloring_prob_log_bound,
    covers_by_cycle_count,
    cycle_cover_count_bound,
    cycle_count_threshold,
    enumerate_cycle_covers,
    held_karp_optimum,
)
from .tours import Tour, doubled_tree_tsp, exact_tour_cost, is_permutation, randomized_tsp

__all__ = ["main"]

OK, FAIL, BAD_PARAM, BAD_STRUCTURE = 0, 1, 2, 3

CSV_COLUMNS = [
    "instance", "algo", "seed", "n", "K", "k_used", "d", "r", "m",
    "cost_bound", "exact_cost", "optimum",
    "wall_ms_decompose", "wall_ms_color", "wall_ms_assemble", "wall_ms_total",
]


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, separators=(",", ":")))
    else:
        print(human)


def _fail(code: int, message: str, as_json: bool = False) -> int:
    if as_json:
        print(json.dumps({"ok": False, "error": message}, separators=(",", ":")))
    else:
        print(f"error: {message}", file=sys.stderr)
    return code


def tour_bytes(tour: Tour) -> bytes:
    """Canonical serialized form of a tour."""
    return (json.dumps(tour.to_json_dict(), separators=(",", ":")) + "\n").encode()


# ---------------------------------------------------------------- gen


def cmd_gen(args) -> int:
    try:
        if args.family == "random":
            if args.n is None or args.k is None:
                raise ValueError("random family needs -n and -k")
            g = random_regular_graph(args.n, args.k, args.seed)
            desc = f"random n={args.n} k={args.k} seed={args.seed}"
        else:
            params = {}
            if args.family in ("cycle", "circulant"):
                if args.n is None:
                    raise ValueError(f"{args.family} needs -n")
                params["n"] = args.n
            if args.family == "complete":
                if args.n is None:
                    raise ValueError("complete needs -n (the clique size)")
                params["q"] = args.n
            if args.family == "hypercube":
                if args.dim is None:
                    raise ValueError("hypercube needs --dim")
                params["dim"] = args.dim
            if args.family == "circulant":
                if not args.offsets:
                    raise ValueError("circulant needs --offsets")
                params["offsets"] = [int(x) for x in args.offsets.split(",")]
            g = named_graph(args.family, **params)
            desc = args.family
    except (ValueError, StructureError) as exc:
        # everything that can go wrong here traces back to the parameters
        return _fail(BAD_PARAM, str(exc), args.json)
    if args.out is None:
        sys.stdout.write(format_graph(g, comment=desc))
        return OK
    write_graph(g, args.out, comment=desc)
    payload = {
        "family": args.family,
        "n": g.n,
        "m": g.m,
        "regularity": g.regularity,
        "connected": g.is_connected(),
        "path": args.out,
    }
    _emit(args, payload,
          f"{args.family}: n={g.n} m={g.m} regular({g.regularity}) -> {args.out}")
    return OK


# --------------------------------------------------------------- tour


def _run_algo(g: Graph, algo: str, seed, args) -> Tour:
    if algo == "rand":
        return randomized_tsp(
            g, seed, exact_cost=args.exact_cost,
            flip_granularity=args.flip_granularity,
        )
    if algo == "det":
        return deterministic_tsp(
            g, exact_cost=args.exact_cost,
            prefer_largest_cut=args.prefer_largest_cut,
        )
    return doubled_tree_tsp(g, exact_cost=args.exact_cost)


def cmd_tour(args) -> int:
    if args.algo == "rand" and args.seed is None:
        return _fail(BAD_PARAM, "--seed is required for --algo rand", args.json)
    try:
        g = read_graph(args.graph)
    except (OSError, GraphFormatError) as exc:
        return _fail(BAD_PARAM, str(exc), args.json)
    try:
        tour = _run_algo(g, args.algo, args.seed, args)
    except StructureError as exc:
        return _fail(BAD_STRUCTURE, str(exc), args.json)
    if args.timing:
        tour.wall_ms = round(sum(tour.phase_ms.values()), 3)
    data = tour_bytes(tour)
    if args.out is not None:
        with open(args.out, "wb") as fh:
            fh.write(data)
    if args.json:
        sys.stdout.write(data.decode())
    else:
        extra = f" exact_cost={tour.exact_cost}" if tour.exact_cost is not None else ""
        dest = f" -> {args.out}" if args.out else ""
        print(
            f"{args.algo}: n={tour.n} K={tour.k_input} k_used={tour.k_used} "
            f"r={tour.num_cycles} cost_bound={tour.cost_bound}{extra}{dest}"
        )
    return OK


# ------------------------------------------------------------- verify


def _first_failure(g: Graph, tour: Tour) -> str | None:
    """The first failing field of a claimed tour, or None if it holds."""
    n, K = g.n, g.regularity
    if not is_permutation(np.asarray(tour.order), n):
        return "order not a permutation"
    if tour.n != n:
        return "n mismatch"
    if tour.k_input != K:
        return "k_input mismatch"
    if tour.algo == "rand":
        if tour.k_used != 1 << (K.bit_length() - 1):
            return "k_used mismatch"
        if not 1 <= tour.num_cycles <= n // 2:
            return "num_cycles out of range"
        if tour.cost_bound != n + 2 * (tour.num_cycles - 1):
            return "cost_bound mismatch"
    elif tour.algo == "det":
        if tour.k_used != K:
            return "k_used mismatch"
        if K == 2:
            if tour.num_cycles != 1:
                return "num_cycles out of range"
            if tour.cost_bound != n:
                return "cost_bound mismatch"
        elif K == 3:
            if tour.num_cycles != 0:
                return "num_cycles out of range"
            if tour.cost_bound != 2 * (n - 1):
                return "cost_bound mismatch"
        else:
            if not 0 <= tour.num_cycles <= n // 3:
                return "num_cycles out of range"
            d = cycle_length_threshold(K)
            cap = n * (Fraction(3, 2) + Fraction(2, d)
                       + Fraction(d - 3, 2 * (K - d + 1)))
            if not (n <= tour.cost_bound <= min(2 * (n - 1), cap)):
                return "cost_bound mismatch"
    elif tour.algo == "mst2":
        if tour.k_used != K:
            return "k_used mismatch"
        if tour.num_cycles != 0:
            return "num_cycles out of range"
        if tour.cost_bound != 2 * (n - 1):
            return "cost_bound mismatch"
    else:
        return "algo unknown"
    cost = exact_tour_cost(g, np.asarray(tour.order, dtype=np.int64))
    if cost > tour.cost_bound:
        return "cost_bound violated by recomputed exact cost"
    if tour.exact_cost is not None and tour.exact_cost != cost:
        return "exact_cost mismatch"
    return None


def cmd_verify(args) -> int:
    try:
        g = read_graph(args.graph)
        with open(args.tour, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        tour = Tour.from_json_dict(raw)
    except (OSError, GraphFormatError, json.JSONDecodeError, StructureError,
            TypeError, ValueError) as exc:
        return _fail(BAD_PARAM, str(exc), args.json)
    if g.regularity is None or not g.is_connected():
        return _fail(BAD_STRUCTURE, "graph is not connected regular", args.json)
    problem = _first_failure(g, tour)
    if problem is not None:
        if args.json:
            print(json.dumps({"ok": False, "field": problem},
                             separators=(",", ":")))
        else:
            print(problem)
        return FAIL
    _emit(args, {"ok": True}, "ok")
    return OK


# -------------------------------------------------------------- bench


def _tour_row(instance: str, algo: str, seed, g: Graph, tour: Tour,
              optimum) -> dict:
    p = tour.phase_ms
    total = sum(p.values())
    return {
        "instance": instance,
        "algo": algo,
        "seed": "" if seed is None else seed,
        "n": tour.n,
        "K": tour.k_input,
        "k_used": tour.k_used,
        "d": "" if tour.d_threshold is None else tour.d_threshold,
        "r": tour.num_cycles,
        "m": "" if algo != "det" else tour.num_dropped,
        "cost_bound": tour.cost_bound,
        "exact_cost": "" if tour.exact_cost is None else tour.exact_cost,
        "optimum": "" if optimum is None else optimum,
        "wall_ms_decompose": round(p.get("decompose", 0.0), 3),
        "wall_ms_color": round(p.get("color", 0.0), 3),
        "wall_ms_assemble": round(p.get("assemble", 0.0), 3),
        "wall_ms_total": round(total, 3),
    }


def _median_rows(rows: list[dict]) -> list[dict]:
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault((row["instance"], row["algo"]), []).append(row)
    out = []
    for (instance, algo), grp in groups.items():
        med = {"instance": instance, "algo": algo, "seed": "median"}
        for col in CSV_COLUMNS[3:]:
            vals = [r[col] for r in grp if r[col] != ""]
            med[col] = round(statistics.median(vals), 3) if vals else ""
        out.append(med)
    return out


def cmd_bench(args) -> int:
    try:
        ns = [int(x) for x in args.n_list.split(",")] if args.n_list else []
        ks = [int(x) for x in args.k_list.split(",")] if args.k_list else []
        algos = args.algos.split(",") if args.algos else []
        for a in algos:
            if a not in ("rand", "det", "mst2"):
                raise ValueError(f"unknown algo {a!r}")
    except ValueError as exc:
        return _fail(BAD_PARAM, str(exc), args.json)
    if "rand" in algos:
        _kernels.warm_up()
    rows: list[dict] = []
    failures = 0
    for n in ns:
        for k in ks:
            instance = f"random-n{n}-k{k}"
            try:
                g = random_regular_graph(n, k, args.gen_seed)
            except (ValueError, StructureError) as exc:
                print(f"warning: {instance}: {exc}", file=sys.stderr)
                failures += 1
                continue
            optimum = None
            if args.with_optimum and g.n <= 15:
                optimum = held_karp_optimum(g)
            for algo in algos:
                seeds = range(args.seeds) if algo == "rand" else [None]
                for seed in seeds:
                    try:
                        tour = _run_algo(g, algo, seed, args)
                    except (StructureError, ValueError) as exc:
                        print(f"warning: {instance} {algo} seed={seed}: {exc}",
                              file=sys.stderr)
                        row = {c: "" for c in CSV_COLUMNS}
                        row.update(instance=instance, algo=algo,
                                   seed="" if seed is None else seed)
                        rows.append(row)
                        failures += 1
                        continue
                    rows.append(_tour_row(instance, algo, seed, g, tour, optimum))
    rows.extend(_median_rows(rows))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    if args.out:
        _emit(args, {"rows": len(rows), "failures": failures, "path": args.out},
              f"{len(rows)} rows ({failures} failures) -> {args.out}")
    return OK


# ------------------------------------------------------------- oracle


def cmd_oracle(args) -> int:
    try:
        if args.op == "held-karp":
            g = read_graph(args.graph)
            opt = held_karp_optimum(g, max_n=args.max_n or 15)
            payload = {"n": g.n, "m": g.m, "optimum": opt}
            human = f"optimum {opt} (n={g.n})"
        elif args.op == "brute":
            g = read_graph(args.graph)
            opt = brute_force_optimum(g, max_n=args.max_n or 10)
            payload = {"n": g.n, "m": g.m, "optimum": opt}
            human = f"optimum {opt} (n={g.n}, exhaustive)"
        elif args.op == "covers":
            g = read_graph(args.graph)
            d = bidirect(g)
            covers = enumerate_cycle_covers(d, max_n=args.max_n or 12)
            by_r = covers_by_cycle_count(covers)
            k = d.regularity
            bounds = {r: cycle_cover_count_bound(g.n, k, r) for r in by_r}
            ok = all(by_r[r] <= bounds[r] for r in by_r)
            payload = {
                "n": g.n, "k": k, "total": len(covers),
                "by_r": {str(r): by_r[r] for r in sorted(by_r)},
                "bound_by_r": {str(r): bounds[r] for r in sorted(bounds)},
                "within_bounds": ok,
            }
            human = (f"{len(covers)} covers, by r: "
                     + ", ".join(f"{r}:{by_r[r]}" for r in sorted(by_r))
                     + ("" if ok else "  BOUND EXCEEDED"))
            if not ok:
                print(human if not args.json
                      else json.dumps(payload, separators=(",", ":")))
                return FAIL
        elif args.op == "f-log":
            val = coloring_prob_log_bound(args.n, args.k)
            payload = {"n": args.n, "k": args.k, "f_log": val}
            human = f"ln f({args.n},{args.k}) = {val:.6f}"
        elif args.op == "threshold":
            thr = cycle_count_threshold(args.n, args.k)
            payload = {"n": args.n, "k": args.k, "value": thr.value,
                       "vacuous": thr.vacuous}
            human = (f"threshold {thr.value:.1f}"
                     + (" (vacuous)" if thr.vacuous else ""))
        elif args.op == "distribution":
            g = read_graph(args.graph)
            d = bidirect(g)
            try:
                rep = coloring_distribution_check(d, args.runs, args.seed)
            except AssertionError as exc:
                return _fail(FAIL, str(exc), args.json)
            payload = {
                "runs": rep.runs, "distinct": rep.distinct,
                "max_frequency": rep.max_frequency,
                "prob_bound": rep.prob_bound, "margin": rep.margin,
                "ok": True,
            }
            human = (f"{rep.distinct} colorings over {rep.runs} runs, "
                     f"max freq {rep.max_frequency:.5f} <= "
                     f"{rep.prob_bound:.5f}+{rep.margin:.5f}")
        else:
            raise ValueError(f"unknown oracle op {args.op!r}")
    except (OSError, GraphFormatError, ValueError) as exc:
        return _fail(BAD_PARAM, str(exc), args.json)
    except StructureError as exc:
        return _fail(BAD_STRUCTURE, str(exc), args.json)
    _emit(args, payload, human)
    return OK


# --------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="regtsp",
        description="TSP approximation toolkit for k-regular graphs",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--family", required=True,
                   choices=("random",) + NAMED_FAMILIES)
    g.add_argument("-n", type=int, help="vertex count (complete: clique size)")
    g.add_argument("-k", type=int, help="regularity (random family)")
    g.add_argument("--dim", type=int, help="hypercube dimension")
    g.add_argument("--offsets", help="circulant offsets, comma-separated")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--out", help="output path (default: stdout)")
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=cmd_gen)

    t = sub.add_parser("tour", help="run a pipeline on a graph file")
    t.add_argument("graph")
    t.add_argument("--algo", required=True, choices=("rand", "det", "mst2"))
    t.add_argument("--seed", type=int, help="master seed (required for rand)")
    t.add_argument("--exact-cost", action="store_true",
                   help="also compute the exact metric cost (n BFS runs)")
    t.add_argument("--timing", action="store_true",
                   help="include wall_ms in the output (breaks byte determinism)")
    t.add_argument("--flip-granularity", choices=("cycle", "component"),
                   default="cycle")
    t.add_argument("--prefer-largest-cut", action="store_true",
                   help="deterministic pipeline: cut cycles at the largest "
                        "qualifying position instead of the smallest")
    t.add_argument("-o", "--out", help="write the tour JSON here")
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_tour)

    v = sub.add_parser("verify", help="check a tour JSON against its graph")
    v.add_argument("graph")
    v.add_argument("tour")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="seeded sweeps to CSV")
    b.add_argument("--n-list", default="", help="comma-separated vertex counts")
    b.add_argument("--k-list", default="", help="comma-separated regularities")
    b.add_argument("--seeds", type=int, default=1,
                   help="seeds 0..S-1 per instance for the randomized pipeline")
    b.add_argument("--gen-seed", type=int, default=0,
                   help="seed for instance generation")
    b.add_argument("--algos", default="rand", help="subset of rand,det,mst2")
    b.add_argument("--exact-cost", action="store_true")
    b.add_argument("--with-optimum", action="store_true",
                   help="add the exact optimum column (n <= 15 instances)")
    b.add_argument("--flip-granularity", choices=("cycle", "component"),
                   default="cycle")
    b.add_argument("--prefer-largest-cut", action="store_true")
    b.add_argument("-o", "--out", help="CSV path (default: stdout)")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bench)

    o = sub.add_parser("oracle", help="exact desk-scale oracles")
    o.add_argument("op", choices=("held-karp", "brute", "covers", "f-log",
                                  "threshold", "distribution"))
    o.add_argument("graph", nargs="?", help="graph file (file-based ops)")
    o.add_argument("-n", type=int)
    o.add_argument("-k", type=int)
    o.add_argument("--max-n", type=int, help="override the oracle size cap")
    o.add_argument("--runs", type=int, default=100000)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--json", action="store_true")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
