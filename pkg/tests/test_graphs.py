import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from regtsp import (
    Graph,
    GraphFormatError,
    StructureError,
    bidirect,
    cover_from_arcs,
    cycle_graph,
    format_graph,
    parse_graph,
    petersen_graph,
    read_graph,
    write_graph,
)


def test_basic_construction():
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert g.n == 4
    assert g.m == 4
    assert g.regularity == 2
    assert g.is_connected()


def test_construction_rejects_bad_edges():
    with pytest.raises(StructureError):
        Graph(3, [(0, 0)])
    with pytest.raises(StructureError):
        Graph(3, [(0, 5)])
    with pytest.raises(StructureError):
        Graph(3, [(0, 1), (1, 0)])
    with pytest.raises(StructureError):
        Graph(0, [])


def test_irregular_graph_has_no_regularity():
    g = Graph(3, [(0, 1), (1, 2)])
    assert g.regularity is None
    assert list(g.degree) == [1, 2, 1]


def test_neighbors_sorted():
    g = Graph(5, [(0, 4), (0, 2), (0, 1), (3, 0)])
    assert list(g.neighbors(0)) == [1, 2, 3, 4]
    assert list(g.neighbors(2)) == [0]


def test_adjacency_csr_consistent():
    g = petersen_graph()
    indptr, nbr, eid = g.adjacency
    assert indptr[-1] == 2 * g.m
    for v in range(g.n):
        seg = nbr[indptr[v]:indptr[v + 1]]
        assert len(seg) == 3
        assert list(seg) == sorted(seg)
        for i, w in enumerate(seg):
            e = eid[indptr[v] + i]
            assert {v, int(w)} == set(map(int, g.edges[e]))


def test_disconnected():
    g = Graph(4, [(0, 1), (2, 3)])
    assert not g.is_connected()
    assert Graph(1, []).is_connected()


def canon(g):
    return {(min(int(u), int(v)), max(int(u), int(v))) for u, v in g.edges}


def test_format_parse_round_trip():
    g = petersen_graph()
    text = format_graph(g, comment="hello")
    h = parse_graph(text)
    assert h.n == g.n
    assert canon(h) == canon(g)
    assert text.startswith("# hello")


def test_read_write_round_trip(tmp_path):
    g = cycle_graph(6)
    path = tmp_path / "c6.graph"
    write_graph(g, path)
    h = read_graph(path)
    assert canon(h) == canon(g)


@pytest.mark.parametrize("text,line", [
    ("", None),
    ("3\n", 1),
    ("3 x\n", 1),
    ("3 1\n0 0\n", 2),
    ("3 1\n0 9\n", 2),
    ("3 2\n0 1\n", None),        # edge count short of header
    ("3 1\n0 1\n1 2\n", None),   # extra edge past header
    ("2 1\nnope\n", 2),
])
def test_parse_errors(text, line):
    with pytest.raises(GraphFormatError) as exc:
        parse_graph(text)
    if line is not None:
        assert f"line {line}" in str(exc.value)


@given(st.integers(2, 8).flatmap(
    lambda n: st.sets(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).map(
            lambda e: (min(e), max(e))
        ).filter(lambda e: e[0] != e[1]),
        max_size=n * (n - 1) // 2,
    ).map(lambda edges: (n, sorted(edges)))
))
def test_round_trip_any_simple_graph(case):
    n, edges = case
    g = Graph(n, edges)
    h = parse_graph(format_graph(g))
    assert h.n == g.n
    assert canon(h) == canon(g)


def test_bidirect_structure():
    g = cycle_graph(4)
    d = bidirect(g)
    assert d.n == 4
    assert d.m == 8
    assert d.regularity == 2
    arcs = set(zip(d.tails.tolist(), d.heads.tolist()))
    for u, v in g.edges:
        assert (int(u), int(v)) in arcs
        assert (int(v), int(u)) in arcs
    # each arc remembers which undirected edge produced it
    for t, h, e in zip(d.tails, d.heads, d.source_edge):
        assert {int(t), int(h)} == set(map(int, g.edges[e]))


def test_digraph_arc_lookup():
    d = bidirect(cycle_graph(5))
    for v in range(5):
        assert all(d.tails[p] == v for p in d.out_arcs(v))
        assert all(d.heads[p] == v for p in d.in_arcs(v))
        assert len(d.out_arcs(v)) == len(d.in_arcs(v)) == 2
    for pos in range(d.m):
        assert d.position_of(int(d.arc_ids[pos])) == pos
    with pytest.raises(KeyError):
        d.position_of(99999)


def test_cover_from_arcs_cycle():
    d = bidirect(cycle_graph(4))
    # pick the arcs going 0->1->2->3->0
    want = {(0, 1), (1, 2), (2, 3), (3, 0)}
    picks = [int(d.arc_ids[i]) for i in range(d.m)
             if (int(d.tails[i]), int(d.heads[i])) in want]
    cover = cover_from_arcs(d, np.array(picks))
    assert cover.r == 1
    assert cover.cycles() == [[0, 1, 2, 3]]


def test_cover_from_arcs_rejects_non_cover():
    d = bidirect(cycle_graph(4))
    with pytest.raises(StructureError):
        cover_from_arcs(d, d.arc_ids[:3])
    with pytest.raises(StructureError):
        cover_from_arcs(d, np.array([123456]))


def test_cover_cycles_start_at_smallest_vertex():
    d = bidirect(cycle_graph(6))
    picks = [int(d.arc_ids[i]) for i in range(d.m)
             if (int(d.heads[i]) - int(d.tails[i])) % 6 == 1]
    cover = cover_from_arcs(d, np.array(picks))
    assert cover.cycles() == [[0, 1, 2, 3, 4, 5]]
