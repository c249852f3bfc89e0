"""Exact desk-scale oracles and closed-form analysis quantities.

Everything here exists to audit the approximation pipelines from an
independent code path: exhaustive enumeration, subset-DP optima, and
the closed-form counting/probability bounds the pipelines are measured
against.  Hard size caps keep each oracle in the seconds range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import StructureError
from .graphs import CycleCover, Digraph, Graph, cover_from_arcs

__all__ = [
    "THRESHOLD_COEFFICIENT",
    "held_karp_optimum",
    "brute_force_optimum",
    "enumerate_cycle_covers",
    "covers_by_cycle_count",
    "cycle_cover_count_bound",
    "coloring_prob_log_bound",
    "coloring_prob_exact",
    "CycleThreshold",
    "cycle_count_threshold",
    "DistributionReport",
    "coloring_distribution_check",
]

# Coefficient of the high-probability cycle-count threshold t = 3.5 n / ln k.
THRESHOLD_COEFFICIENT = 3.5


def metric_closure(g: Graph) -> np.ndarray:
    """All-pairs unweighted shortest-path distances as an int matrix."""
    if g.m == 0:
        if g.n == 1:
            return np.zeros((1, 1), dtype=np.int64)
        raise StructureError("graph is disconnected (no edges)")
    mat = csr_matrix(
        (np.ones(g.m, dtype=np.int8), (g.edges[:, 0], g.edges[:, 1])),
        shape=(g.n, g.n),
    )
    dist = shortest_path(mat, method="D", directed=False, unweighted=True)
    if np.isinf(dist).any():
        raise StructureError("graph is disconnected")
    return dist.astype(np.int64)


def held_karp_optimum(g: Graph, max_n: int = 15) -> int:
    """Exact minimum tour cost over the shortest-path metric, subset DP.

    The tour visits every vertex exactly once in some cyclic order and
    pays the shortest-path distance between consecutive vertices.
    Limited to n <= ``max_n`` (O(2^n n^2) time).
    """
    if g.n > max_n:
        raise ValueError(f"held_karp_optimum limited to n <= {max_n}, got n={g.n}")
    if g.n == 1:
        return 0
    D = metric_closure(g)
    n1 = g.n - 1
    size = 1 << n1
    INF = 1 << 40
    dp = [[INF] * n1 for _ in range(size)]
    for j in range(n1):
        dp[1 << j][j] = int(D[0][j + 1])
    for mask in range(size):
        row = dp[mask]
        for j in range(n1):
            cj = row[j]
            if cj >= INF or not (mask >> j) & 1:
                continue
            Dj = D[j + 1]
            for l in range(n1):
                if (mask >> l) & 1:
                    continue
                nm = mask | (1 << l)
                val = cj + int(Dj[l + 1])
                if val < dp[nm][l]:
                    dp[nm][l] = val
    full = dp[size - 1]
    return min(full[j] + int(D[j + 1][0]) for j in range(n1))


def brute_force_optimum(g: Graph, max_n: int = 10) -> int:
    """Exact minimum tour cost by exhaustive permutation search.

    Fixes vertex 0 first and skips mirror images, so (n-1)!/2 orders
    are evaluated.  Deliberately shares no code with held_karp_optimum
    beyond the metric closure; the two are cross-checks of each other.
    """
    if g.n > max_n:
        raise ValueError(f"brute_force_optimum limited to n <= {max_n}, got n={g.n}")
    if g.n == 1:
        return 0
    if g.n == 2:
        return 2 * int(metric_closure(g)[0][1])
    D = metric_closure(g).tolist()
    n = g.n
    best = None
    for perm in permutations(range(1, n)):
        if perm[0] > perm[-1]:
            continue
        cost = D[0][perm[0]] + D[perm[-1]][0]
        prev = perm[0]
        for v in perm[1:]:
            cost += D[prev][v]
            prev = v
        if best is None or cost < best:
            best = cost
    return best


def enumerate_cycle_covers(d: Digraph, max_n: int = 12) -> list[CycleCover]:
    """All cycle covers of a small digraph, by backtracking.

    A cover picks one out-arc per vertex such that every vertex is also
    entered exactly once.  Returns validated CycleCover objects in
    lexicographic order of the chosen arc positions.
    """
    if d.n > max_n:
        raise ValueError(f"enumerate_cycle_covers limited to n <= {max_n}, got n={d.n}")
    n = d.n
    out_lists = [
        [(int(p), int(d.heads[p])) for p in d.out_arcs(v)] for v in range(n)
    ]
    results: list[CycleCover] = []
    chosen: list[int] = []

    def rec(v: int, used_heads: int) -> None:
        if v == n:
            arc_ids = d.arc_ids[np.array(chosen, dtype=np.int64)]
            results.append(cover_from_arcs(d, arc_ids))
            return
        for p, h in out_lists[v]:
            bit = 1 << h
            if used_heads & bit:
                continue
            chosen.append(p)
            rec(v + 1, used_heads | bit)
            chosen.pop()

    rec(0, 0)
    return results


def covers_by_cycle_count(covers) -> dict[int, int]:
    """Histogram {r: count} over a sequence of CycleCover objects."""
    hist: dict[int, int] = {}
    for c in covers:
        hist[c.r] = hist.get(c.r, 0) + 1
    return dict(sorted(hist.items()))


def cycle_cover_count_bound(n: int, k: int, r: int) -> int:
    """Upper bound C(n,r) * k^(n-r) on the number of covers with r cycles.

    Exact integer arithmetic.  Requires 1 <= r <= n // 2 (cycles have
    length at least 2).
    """
    if not 1 <= r <= n // 2:
        raise ValueError(f"need 1 <= r <= n//2 = {n // 2}, got r={r}")
    return math.comb(n, r) * k ** (n - r)


def coloring_prob_log_bound(n: int, k: int) -> float:
    """ln of the per-coloring probability ceiling [k^k/(k!)^2]^n / 2^(k-1).

    Computed in log space with ln k! by exact summation, so huge n and
    k never overflow.
    """
    if k < 1 or n < 1:
        raise ValueError("need n >= 1 and k >= 1")
    log_kfact = sum(math.log(i) for i in range(2, k + 1))
    return n * (k * math.log(k) - 2.0 * log_kfact) - (k - 1) * math.log(2.0)


def coloring_prob_exact(n: int, k: int) -> Fraction:
    """The same ceiling as an exact rational, for cross-checking the log form."""
    if k < 1 or n < 1:
        raise ValueError("need n >= 1 and k >= 1")
    return Fraction(k**k, math.factorial(k) ** 2) ** n / Fraction(2 ** (k - 1))


class CycleThreshold(NamedTuple):
    value: float
    vacuous: bool


def cycle_count_threshold(n: int, k: int) -> CycleThreshold:
    """High-probability ceiling 3.5 n / ln k on the best cover's cycle count.

    Flagged vacuous when the value reaches n/2, i.e. whenever
    ln k <= 7: every cover has at most n/2 cycles anyway.
    """
    if k < 2:
        raise ValueError("threshold needs k >= 2")
    value = THRESHOLD_COEFFICIENT * n / math.log(k)
    return CycleThreshold(value, value >= n / 2)


@dataclass
class DistributionReport:
    """Outcome of a Monte-Carlo audit of the coloring distribution."""

    runs: int
    distinct: int
    frequencies: dict[tuple, float]
    max_frequency: float
    prob_bound: float
    margin: float

    @property
    def limit(self) -> float:
        return self.prob_bound + self.margin


def coloring_distribution_check(
    d: Digraph, runs: int, seed: int, batch: int = 25000
) -> DistributionReport:
    """Sample the coloring distribution and audit it against the ceiling.

    Runs ``runs`` independent colorings of d and tallies the empirical
    frequency of each distinct output.  Sampling is batched: each batch
    colors one disjoint union of identical copies of d in a single
    pipeline invocation, which draws per-copy randomness independently,
    so the copies are iid samples from the single-instance
    distribution.  Batch seeds are spawned deterministically from
    ``seed``.

    Raises AssertionError if the maximum observed frequency exceeds
    the ceiling exp(coloring_prob_log_bound) plus four binomial
    standard deviations.
    """
    from .coloring import RngState, rand_cycle_cover_coloring

    k = d.require_regular("coloring distribution check")
    if d.n > 6 or k > 4:
        raise ValueError("distribution check limited to n <= 6, k <= 4")
    if runs < 10**4:
        raise ValueError("need at least 10^4 runs for a meaningful frequency audit")
    m0 = d.m
    n0 = d.n
    counts: dict[tuple, int] = {}
    seeds = np.random.SeedSequence(seed).spawn((runs + batch - 1) // batch)
    done = 0
    for ss in seeds:
        copies = min(batch, runs - done)
        done += copies
        off = (np.arange(copies, dtype=np.int64) * n0)[:, None]
        tails = (d.tails[None, :] + off).ravel()
        heads = (d.heads[None, :] + off).ravel()
        union = Digraph(n0 * copies, tails, heads, validate=False)
        coloring = rand_cycle_cover_coloring(union, RngState.from_seedseq(ss))
        mat = coloring.colors.reshape(copies, m0)
        uniq, cnt = np.unique(mat, axis=0, return_counts=True)
        for row, c in zip(uniq, cnt):
            key = tuple(int(x) for x in row)
            counts[key] = counts.get(key, 0) + int(c)
    assert sum(counts.values()) == runs
    freqs = {key: c / runs for key, c in counts.items()}
    max_freq = max(freqs.values())
    bound = math.exp(coloring_prob_log_bound(n0, k))
    margin = 4.0 * math.sqrt(bound / runs)
    report = DistributionReport(
        runs=runs,
        distinct=len(freqs),
        frequencies=freqs,
        max_frequency=max_freq,
        prob_bound=bound,
        margin=margin,
    )
    if max_freq > report.limit:
        raise AssertionError(
            f"coloring frequency {max_freq:.5f} exceeds ceiling "
            f"{bound:.5f} + margin {margin:.5f}"
        )
    return report
