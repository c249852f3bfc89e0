"""Matching decompositions of regular digraphs.

A k-regular digraph, viewed bipartitely (tails on the left, heads on the
right), is a k-regular bipartite multigraph, which splits into k perfect
matchings.  Keeping a prefix of those matchings extracts a spanning
k'-regular sub-digraph for any k' <= k; the pipelines use this to reduce
an arbitrary regularity to a power of two.

The decomposition is deterministic: even degrees are halved by
alternating along Euler circuits, odd degrees are reduced by peeling one
perfect matching, and ties everywhere are broken by smallest edge id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import StructureError
from .graphs import Digraph

__all__ = [
    "BipartiteMultigraph",
    "bipartite_encode",
    "euler_split",
    "peel_matching",
    "decompose_matchings",
    "regular_subgraph",
]


@dataclass
class BipartiteMultigraph:
    """Multigraph on disjoint left/right vertex sets.

    Parallel edges are allowed.  Each edge carries a stable id that
    survives subgraph extraction, so edges can be traced back through a
    chain of splits to the object they came from.
    """

    n_left: int
    n_right: int
    lefts: np.ndarray
    rights: np.ndarray
    edge_ids: np.ndarray
    _incidence: tuple[np.ndarray, np.ndarray] | None = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        self.lefts = np.asarray(self.lefts, dtype=np.int32)
        self.rights = np.asarray(self.rights, dtype=np.int32)
        self.edge_ids = np.asarray(self.edge_ids, dtype=np.int64)
        if not (self.lefts.shape == self.rights.shape == self.edge_ids.shape):
            raise StructureError("lefts, rights and edge_ids must have equal length")
        if self.num_edges:
            if self.lefts.min() < 0 or self.lefts.max() >= self.n_left:
                raise StructureError("left endpoint out of range")
            if self.rights.min() < 0 or self.rights.max() >= self.n_right:
                raise StructureError("right endpoint out of range")

    @property
    def num_edges(self) -> int:
        return len(self.edge_ids)

    def degrees(self) -> tuple[np.ndarray, np.ndarray]:
        """Left and right degree sequences."""
        dl = np.bincount(self.lefts, minlength=self.n_left)
        dr = np.bincount(self.rights, minlength=self.n_right)
        return dl, dr

    def regularity(self) -> int | None:
        """Common degree of every vertex on both sides, or None."""
        dl, dr = self.degrees()
        if dl.size == 0 or dr.size == 0:
            return None
        k = int(dl[0])
        if (dl == k).all() and (dr == k).all():
            return k
        return None

    def require_regular(self) -> int:
        k = self.regularity()
        if k is None:
            raise StructureError("bipartite multigraph is not regular")
        return k

    def subgraph(self, positions: np.ndarray) -> "BipartiteMultigraph":
        """Restrict to the edges at the given positions, keeping ids."""
        positions = np.asarray(positions)
        return BipartiteMultigraph(
            self.n_left,
            self.n_right,
            self.lefts[positions],
            self.rights[positions],
            self.edge_ids[positions],
        )

    def incidence(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR edge lists over the combined vertex range.

        Vertices 0..n_left-1 are left, n_left..n_left+n_right-1 are
        right.  Returns (indptr, edge_positions); each edge appears
        once per endpoint, positions sorted ascending within a vertex.
        """
        if self._incidence is None:
            nv = self.n_left + self.n_right
            ends = np.concatenate([self.lefts, self.rights.astype(np.int64) + self.n_left])
            pos = np.concatenate([np.arange(self.num_edges), np.arange(self.num_edges)])
            order = np.lexsort((pos, ends))
            indptr = np.zeros(nv + 1, dtype=np.int64)
            np.add.at(indptr, ends + 1, 1)
            np.cumsum(indptr, out=indptr)
            self._incidence = (indptr, pos[order])
        return self._incidence


def bipartite_encode(d: Digraph) -> BipartiteMultigraph:
    """View a digraph as a bipartite multigraph.

    Arc (u, v) becomes an edge between left-u and right-v, and the
    edge id equals the arc id, so matchings in the encoding name arc
    sets in the original digraph.  A k-regular digraph encodes to a
    k-regular multigraph.
    """
    return BipartiteMultigraph(d.n, d.n, d.tails, d.heads, d.arc_ids)


def euler_split(b: BipartiteMultigraph) -> tuple[BipartiteMultigraph, BipartiteMultigraph]:
    """Split an all-even-degree bipartite multigraph into two halves.

    Walks an Euler circuit of each connected component and assigns
    alternate edges to the two halves.  Circuits in a bipartite graph
    have even length, so every vertex sees its incident circuit edges
    in consecutive pairs and each half gets exactly half of its degree.
    The half containing the smallest edge id is returned first.
    """
    dl, dr = b.degrees()
    if (dl % 2).any() or (dr % 2).any():
        raise StructureError("euler split requires all degrees even")
    m = b.num_edges
    indptr, inc = b.incidence()
    cursor = indptr[:-1].copy()
    used = np.zeros(m, dtype=bool)
    side = np.zeros(m, dtype=bool)

    # Iterative Hierholzer.  The stack pops emit edges in reverse
    # traversal order, which is still a circuit, so alternation along
    # the emitted sequence is alternation along a circuit.
    for start in range(b.n_left):
        if cursor[start] >= indptr[start + 1]:
            continue
        stack = [(start, -1)]
        parity = False
        while stack:
            v, entry_edge = stack[-1]
            advanced = False
            while cursor[v] < indptr[v + 1]:
                p = inc[cursor[v]]
                cursor[v] += 1
                if used[p]:
                    continue
                used[p] = True
                w = b.rights[p] + b.n_left if v < b.n_left else b.lefts[p]
                stack.append((w, p))
                advanced = True
                break
            if not advanced:
                stack.pop()
                if entry_edge >= 0:
                    side[entry_edge] = parity
                    parity = not parity

    positions_a = np.flatnonzero(~side)
    positions_b = np.flatnonzero(side)
    half_a = b.subgraph(positions_a)
    half_b = b.subgraph(positions_b)
    if half_b.num_edges and (
        half_a.num_edges == 0 or half_b.edge_ids.min() < half_a.edge_ids.min()
    ):
        half_a, half_b = half_b, half_a
    return half_a, half_b


def peel_matching(b: BipartiteMultigraph) -> np.ndarray:
    """Find one perfect matching; return its edge positions.

    Parallel edges are collapsed before matching and each matched pair
    is then charged to its smallest-id parallel edge, which keeps the
    result deterministic.  Raises StructureError when no perfect
    matching exists (never the case for a regular multigraph).
    """
    if b.n_left != b.n_right:
        raise StructureError("perfect matching needs equal side sizes")
    n = b.n_left
    if n == 0:
        return np.zeros(0, dtype=np.int64)

    # Collapse parallels: keep, per (left, right) pair, the position of
    # the smallest edge id.  Positions are sorted by id already when ids
    # are the default arange, but not in general, so sort explicitly.
    key = b.lefts.astype(np.int64) * n + b.rights
    order = np.lexsort((b.edge_ids, key))
    first = np.ones(len(order), dtype=bool)
    first[1:] = key[order][1:] != key[order][:-1]
    rep = order[first]

    biadj = csr_matrix(
        (np.ones(len(rep), dtype=np.int8), (b.lefts[rep], b.rights[rep])),
        shape=(n, n),
    )
    col_of_row = maximum_bipartite_matching(biadj, perm_type="column")
    if (col_of_row < 0).any():
        raise StructureError("no perfect matching in bipartite multigraph")

    matched_keys = np.arange(n, dtype=np.int64) * n + col_of_row
    lookup = np.searchsorted(key[rep], matched_keys)
    return np.sort(rep[lookup])


def decompose_matchings(b: BipartiteMultigraph) -> list[np.ndarray]:
    """Partition a k-regular bipartite multigraph into k matchings.

    Returns k arrays of edge ids, each a perfect matching, disjoint,
    covering every edge.  Even k halves along Euler circuits and
    recurses into the half holding the smallest edge id first; odd k
    peels one matching (emitted first) and recurses on the rest.  The
    output order is therefore a deterministic function of the input.
    """
    k = b.require_regular()
    if b.n_left == 0:
        raise StructureError("cannot decompose an empty multigraph")
    if k == 1:
        return [np.sort(b.edge_ids)]
    if k % 2 == 0:
        half_a, half_b = euler_split(b)
        return decompose_matchings(half_a) + decompose_matchings(half_b)
    peeled = peel_matching(b)
    keep = np.ones(b.num_edges, dtype=bool)
    keep[peeled] = False
    rest = b.subgraph(np.flatnonzero(keep))
    return [np.sort(b.edge_ids[peeled])] + decompose_matchings(rest)


def regular_subgraph(d: Digraph, k_target: int) -> Digraph:
    """Spanning k_target-regular sub-digraph of a k-regular digraph.

    Decomposes the bipartite view into k perfect matchings and keeps
    the first k_target of them, which deletes the trailing matchings in
    decomposition order.  Arc ids are preserved.  When k_target equals
    the current regularity the digraph is returned unchanged.
    """
    k = d.require_regular()
    if not 1 <= k_target <= k:
        raise StructureError(f"target regularity {k_target} not in 1..{k}")
    if k_target == k:
        return d
    matchings = decompose_matchings(bipartite_encode(d))
    kept_ids = np.sort(np.concatenate(matchings[:k_target]))
    positions = np.searchsorted(d.arc_ids, kept_ids)
    source = None if d.source_edge is None else d.source_edge[positions]
    return Digraph(
        d.n,
        d.tails[positions],
        d.heads[positions],
        arc_ids=kept_ids,
        source_edge=source,
    )
