import math
from fractions import Fraction

import numpy as np
import pytest

from regtsp import (
    StructureError,
    bidirect,
    brute_force_optimum,
    circulant_graph,
    coloring_distribution_check,
    coloring_prob_exact,
    coloring_prob_log_bound,
    complete_graph,
    covers_by_cycle_count,
    cycle_cover_count_bound,
    cycle_count_threshold,
    cycle_graph,
    enumerate_cycle_covers,
    held_karp_optimum,
    hypercube_graph,
    metric_closure,
    petersen_graph,
)
from regtsp.graphs import Graph


def test_metric_closure_cycle():
    dist = metric_closure(cycle_graph(6))
    assert dist[0, 3] == 3
    assert dist[0, 5] == 1
    assert (dist == dist.T).all()
    assert (np.diag(dist) == 0).all()


def test_metric_closure_disconnected():
    with pytest.raises(StructureError):
        metric_closure(Graph(4, [(0, 1), (2, 3)]))


# frozen by two independent routes: dynamic programming over subsets
# and exhaustive permutation search agree on each of these
FROZEN_OPTIMA = [
    (complete_graph(4), 4),
    (complete_graph(5), 5),
    (complete_graph(6), 6),
    (cycle_graph(8), 8),
    (hypercube_graph(3), 8),
    (petersen_graph(), 11),
]


@pytest.mark.parametrize("g,want", FROZEN_OPTIMA,
                         ids=["k4", "k5", "k6", "c8", "q3", "petersen"])
def test_frozen_optima_both_routes(g, want):
    assert held_karp_optimum(g) == want
    assert brute_force_optimum(g) == want


def test_held_karp_circulant():
    assert held_karp_optimum(circulant_graph(12, [1, 3])) == 12


def test_oracle_size_caps():
    big = cycle_graph(16)
    with pytest.raises(ValueError):
        held_karp_optimum(big)
    with pytest.raises(ValueError):
        brute_force_optimum(cycle_graph(11))
    with pytest.raises(ValueError):
        enumerate_cycle_covers(bidirect(cycle_graph(13)))


FROZEN_COVER_COUNTS = [
    ("c5", cycle_graph(5), {1: 2}),
    ("k4", complete_graph(4), {1: 6, 2: 3}),
    ("k5", complete_graph(5), {1: 24, 2: 20}),
    ("q3", hypercube_graph(3), {1: 12, 2: 36, 3: 24, 4: 9}),
    ("petersen", petersen_graph(), {2: 54, 5: 6}),
]


@pytest.mark.parametrize("name,g,want", FROZEN_COVER_COUNTS,
                         ids=[c[0] for c in FROZEN_COVER_COUNTS])
def test_frozen_cycle_cover_counts(name, g, want):
    covers = enumerate_cycle_covers(bidirect(g))
    assert covers_by_cycle_count(covers) == want
    for cov in covers:
        assert sum(len(c) for c in cov.cycles()) == g.n


def test_cover_counts_within_combinatorial_bound():
    for _, g, want in FROZEN_COVER_COUNTS:
        k = g.regularity
        for r, count in want.items():
            assert count <= cycle_cover_count_bound(g.n, k, r)


def test_cycle_cover_count_bound_values():
    # C(n,r) * k^(n-r)
    assert cycle_cover_count_bound(10, 3, 2) == 45 * 3 ** 8 == 295245
    assert cycle_cover_count_bound(8, 3, 1) == 8 * 3 ** 7 == 17496
    assert cycle_cover_count_bound(6, 2, 3) == 20 * 2 ** 3
    with pytest.raises(ValueError):
        cycle_cover_count_bound(10, 3, 6)
    with pytest.raises(ValueError):
        cycle_cover_count_bound(10, 3, 0)


def test_prob_log_bound_matches_exact_rational():
    """Log-space evaluation against big-rational arithmetic, 1e-12 relative."""
    for n in range(1, 17):
        for k in (1, 2, 3, 4, 8, 16):
            exact = coloring_prob_exact(n, k)
            logval = coloring_prob_log_bound(n, k)
            want = math.log(exact.numerator) - math.log(exact.denominator)
            assert logval == pytest.approx(want, rel=1e-12)


def test_prob_exact_small_values():
    assert coloring_prob_exact(3, 2) == Fraction(1, 2)
    assert coloring_prob_exact(4, 2) == Fraction(1, 2)
    assert coloring_prob_exact(1, 4) == Fraction(4 ** 4, 24 ** 2) / 8


def test_prob_log_bound_frozen():
    assert coloring_prob_log_bound(2000, 16) == pytest.approx(
        -33974.9985203581, rel=1e-12
    )
    assert coloring_prob_log_bound(100, 4) == pytest.approx(
        -83.17246316331267, rel=1e-12
    )
    with pytest.raises(ValueError):
        coloring_prob_log_bound(0, 4)


def test_cycle_count_threshold():
    t = cycle_count_threshold(10_000, 2048)
    assert t.value == pytest.approx(3.5 * 10_000 / math.log(2048))
    assert not t.vacuous
    assert math.ceil(t.value) == 4591
    # small n or small k gives a bound above n/2, which certifies nothing
    assert cycle_count_threshold(100, 4).vacuous
    assert cycle_count_threshold(2000, 16).vacuous


def test_distribution_check_two_regular():
    d = bidirect(cycle_graph(3))
    rep = coloring_distribution_check(d, runs=10_000, seed=0)
    assert rep.runs == 10_000
    assert rep.distinct == 2
    assert rep.prob_bound == pytest.approx(0.5)
    assert abs(rep.max_frequency - 0.5) < rep.margin
    assert rep.limit == pytest.approx(rep.prob_bound + rep.margin)
    assert sum(rep.frequencies.values()) == pytest.approx(1.0)


def test_distribution_check_seed_determinism():
    d = bidirect(cycle_graph(4))
    a = coloring_distribution_check(d, runs=10_000, seed=5)
    b = coloring_distribution_check(d, runs=10_000, seed=5)
    assert a.frequencies == b.frequencies


def test_distribution_check_guards():
    d = bidirect(cycle_graph(3))
    with pytest.raises(ValueError):
        coloring_distribution_check(d, runs=500, seed=0)
    with pytest.raises(ValueError):
        coloring_distribution_check(bidirect(cycle_graph(8)), runs=10_000, seed=0)
