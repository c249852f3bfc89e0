import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regtsp import (
    StructureError,
    bidirect,
    complete_graph,
    cycle_graph,
    decompose_matchings,
    hypercube_graph,
    petersen_graph,
    random_regular_graph,
    regular_subgraph,
)
from regtsp.decompose import bipartite_encode, euler_split, peel_matching


def test_bipartite_encode_mirrors_arcs():
    d = bidirect(cycle_graph(4))
    b = bipartite_encode(d)
    assert b.n_left == b.n_right == 4
    assert b.num_edges == d.m
    assert np.array_equal(b.lefts, d.tails)
    assert np.array_equal(b.rights, d.heads)
    assert b.regularity() == 2


def test_euler_split_halves_degrees():
    d = bidirect(complete_graph(5))
    b = bipartite_encode(d)
    h1, h2 = euler_split(b)
    assert h1.num_edges + h2.num_edges == b.num_edges
    for half in (h1, h2):
        dl, dr = half.degrees()
        assert (dl == 2).all() and (dr == 2).all()
    # the two halves partition the edge ids
    ids = np.sort(np.concatenate([h1.edge_ids, h2.edge_ids]))
    assert np.array_equal(ids, np.sort(b.edge_ids))


def test_euler_split_rejects_odd_degrees():
    d = bidirect(petersen_graph())
    with pytest.raises(StructureError):
        euler_split(bipartite_encode(d))


def test_peel_matching_is_perfect():
    d = bidirect(petersen_graph())
    b = bipartite_encode(d)
    picks = peel_matching(b)
    assert len(picks) == b.n_left
    assert sorted(b.lefts[picks].tolist()) == list(range(b.n_left))
    assert sorted(b.rights[picks].tolist()) == list(range(b.n_right))


def test_decompose_matchings_partitions_edges():
    d = bidirect(complete_graph(6))
    b = bipartite_encode(d)
    parts = decompose_matchings(b)
    assert len(parts) == 5
    ids = np.sort(np.concatenate(parts))
    assert np.array_equal(ids, np.sort(b.edge_ids))
    for part in parts:
        lefts = b.lefts[np.searchsorted(b.edge_ids, part)]
        assert sorted(lefts.tolist()) == list(range(6))


@pytest.mark.parametrize("K,k_target", [(3, 2), (5, 4), (6, 4), (7, 4), (9, 8)])
def test_regular_subgraph_hits_target(K, k_target):
    d = bidirect(random_regular_graph(24, K, seed=0))
    sub = regular_subgraph(d, k_target)
    assert sub.regularity == k_target
    assert sub.n == d.n
    # arcs of the subgraph are arcs of the parent
    assert np.isin(sub.arc_ids, d.arc_ids).all()


def test_regular_subgraph_identity():
    d = bidirect(hypercube_graph(3))
    sub = regular_subgraph(d, 3)
    assert sub is d


def test_regular_subgraph_rejects_bad_target():
    d = bidirect(cycle_graph(5))
    with pytest.raises(StructureError):
        regular_subgraph(d, 3)
    with pytest.raises(StructureError):
        regular_subgraph(d, 0)


def test_regular_subgraph_keeps_source_edges():
    d = bidirect(petersen_graph())
    sub = regular_subgraph(d, 2)
    pos = np.searchsorted(d.arc_ids, sub.arc_ids)
    assert np.array_equal(sub.source_edge, d.source_edge[pos])
    assert np.array_equal(sub.tails, d.tails[pos])
    assert np.array_equal(sub.heads, d.heads[pos])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 1000), st.sampled_from([(10, 3), (12, 5), (9, 6), (14, 7)]))
def test_regular_subgraph_power_of_two_chain(seed, shape):
    """Repeated halving walks the whole power-of-two chain below K."""
    n, K = shape
    d = bidirect(random_regular_graph(n, K, seed=seed))
    k = 1 << (K.bit_length() - 1)
    while k >= 1:
        sub = regular_subgraph(d, k)
        assert sub.regularity == k
        k //= 2
