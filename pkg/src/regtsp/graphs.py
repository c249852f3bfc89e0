"""Core graph containers and the text file format.

Vertices are dense integers 0..n-1 throughout; arbitrary labels only
exist at the file-IO boundary (they don't: files are numeric too).
Edges and arcs carry stable integer ids, and every algorithm in the
package communicates subsets of them as id arrays, so that colors and
multiplicities survive vertex remapping.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import GraphFormatError, StructureError

__all__ = [
    "Graph",
    "Digraph",
    "CycleCover",
    "parse_graph",
    "format_graph",
    "read_graph",
    "write_graph",
    "bidirect",
    "cover_from_arcs",
]


class Graph:
    """Simple undirected graph with stable edge ids.

    Attributes
    ----------
    n : int
        Vertex count; vertices are 0..n-1.
    edges : ndarray, shape (m, 2)
        Endpoint pairs in input order; edge i has id i.
    regularity : int or None
        k if every vertex has degree exactly k, else None.
    """

    __slots__ = ("n", "edges", "degree", "regularity", "_indptr", "_nbr", "_eid")

    def __init__(self, n, edges):
        n = int(n)
        if n < 1:
            raise StructureError("need at least one vertex")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise StructureError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise StructureError("self-loop")
            key = np.minimum(edges[:, 0], edges[:, 1]) * n + np.maximum(
                edges[:, 0], edges[:, 1]
            )
            if np.unique(key).size != key.size:
                raise StructureError("duplicate edge")
        self.n = n
        self.edges = edges.astype(np.int32)
        self.degree = np.bincount(edges.ravel(), minlength=n).astype(np.int64)
        self.regularity = (
            int(self.degree[0]) if n and np.all(self.degree == self.degree[0]) else None
        )
        self._indptr = None
        self._nbr = None
        self._eid = None

    @property
    def m(self):
        return len(self.edges)

    def _build_adjacency(self):
        # CSR over both edge directions, neighbors ascending within each
        # row so every traversal in the package is deterministic.
        e = self.edges
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        eid = np.concatenate([np.arange(self.m), np.arange(self.m)]).astype(np.int32)
        order = np.lexsort((dst, src))
        self._nbr = dst[order].astype(np.int32)
        self._eid = eid[order]
        counts = np.bincount(src, minlength=self.n)
        self._indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)

    @property
    def adjacency(self):
        """(indptr, neighbors, edge_ids) in CSR layout, neighbors ascending."""
        if self._indptr is None:
            self._build_adjacency()
        return self._indptr, self._nbr, self._eid

    def neighbors(self, v):
        indptr, nbr, _ = self.adjacency
        return nbr[indptr[v] : indptr[v + 1]]

    def is_connected(self):
        if self.n == 1:
            return True
        if self.m == 0:
            return False
        mat = csr_matrix(
            (np.ones(self.m, dtype=np.int8), (self.edges[:, 0], self.edges[:, 1])),
            shape=(self.n, self.n),
        )
        ncomp, _ = connected_components(mat, directed=False)
        return ncomp == 1

    def __repr__(self):
        tag = f", regular({self.regularity})" if self.regularity is not None else ""
        return f"Graph(n={self.n}, m={self.m}{tag})"


class Digraph:
    """Directed multigraph with stable arc ids.

    Parallel arcs are permitted, self-loops are not.  Arc ids survive
    subgraph extraction and vertex splitting/fusing: ``arc_ids[i]`` is
    the stable id of the arc stored at position i, and tails/heads are
    positional arrays.  ``source_edge`` (present on bidirected graphs
    and their subgraphs) maps each position to the undirected edge id
    the arc came from.
    """

    __slots__ = (
        "n",
        "tails",
        "heads",
        "arc_ids",
        "source_edge",
        "regularity",
        "_out_indptr",
        "_out_pos",
        "_in_indptr",
        "_in_pos",
    )

    def __init__(self, n, tails, heads, arc_ids=None, source_edge=None, validate=True):
        self.n = int(n)
        self.tails = np.asarray(tails, dtype=np.int32)
        self.heads = np.asarray(heads, dtype=np.int32)
        if arc_ids is None:
            arc_ids = np.arange(len(self.tails), dtype=np.int64)
        self.arc_ids = np.asarray(arc_ids, dtype=np.int64)
        self.source_edge = (
            None if source_edge is None else np.asarray(source_edge, dtype=np.int32)
        )
        if validate:
            if self.n < 1:
                raise StructureError("need at least one vertex")
            if len(self.tails) != len(self.heads) or len(self.tails) != len(self.arc_ids):
                raise StructureError("mismatched arc arrays")
            if self.tails.size:
                lo = min(self.tails.min(), self.heads.min())
                hi = max(self.tails.max(), self.heads.max())
                if lo < 0 or hi >= self.n:
                    raise StructureError("arc endpoint out of range")
                if np.any(self.tails == self.heads):
                    raise StructureError("self-loop arc")
        outdeg = np.bincount(self.tails, minlength=self.n)
        indeg = np.bincount(self.heads, minlength=self.n)
        if (
            self.n
            and np.all(outdeg == outdeg[0])
            and np.all(indeg == outdeg[0])
        ):
            self.regularity = int(outdeg[0])
        else:
            self.regularity = None
        self._out_indptr = None
        self._out_pos = None
        self._in_indptr = None
        self._in_pos = None

    @property
    def m(self):
        return len(self.tails)

    def require_regular(self, what="operation"):
        if self.regularity is None:
            raise StructureError(f"{what} needs a regular digraph")
        return self.regularity

    def _group(self, verts):
        order = np.argsort(verts, kind="stable").astype(np.int64)
        counts = np.bincount(verts, minlength=self.n)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        return indptr, order

    def out_arcs(self, v):
        """Positions of arcs with tail v, ascending by position."""
        if self._out_indptr is None:
            self._out_indptr, self._out_pos = self._group(self.tails)
        return self._out_pos[self._out_indptr[v] : self._out_indptr[v + 1]]

    def in_arcs(self, v):
        """Positions of arcs with head v, ascending by position."""
        if self._in_indptr is None:
            self._in_indptr, self._in_pos = self._group(self.heads)
        return self._in_pos[self._in_indptr[v] : self._in_indptr[v + 1]]

    def position_of(self, arc_id):
        pos = np.searchsorted(self.arc_ids, arc_id)
        if pos >= self.m or self.arc_ids[pos] != arc_id:
            # arc_ids are ascending in every construction path; fall back
            # to a scan if a caller ever builds them otherwise
            hits = np.nonzero(self.arc_ids == arc_id)[0]
            if not hits.size:
                raise KeyError(f"no arc with id {arc_id}")
            return int(hits[0])
        return int(pos)

    def __repr__(self):
        tag = f", regular({self.regularity})" if self.regularity is not None else ""
        return f"Digraph(n={self.n}, arcs={self.m}{tag})"


class CycleCover:
    """A set of arcs forming vertex-disjoint cycles covering every vertex.

    Attributes
    ----------
    arc_ids : ndarray
        Stable ids of the arcs in the cover, one leaving each vertex.
    successor : ndarray, shape (n,)
        successor[v] is the head of the unique cover arc leaving v; a
        fixed-point-free permutation.
    r : int
        Number of cycles (orbits of the successor permutation).
    labels : ndarray, shape (n,)
        Cycle index of each vertex, 0..r-1, numbered by smallest vertex.
    """

    __slots__ = ("arc_ids", "successor", "r", "labels")

    def __init__(self, arc_ids, successor, r, labels):
        self.arc_ids = arc_ids
        self.successor = successor
        self.r = r
        self.labels = labels

    @property
    def n(self):
        return len(self.successor)

    def cycles(self):
        """Vertex lists of the cycles, each starting at its smallest vertex."""
        out = []
        for c in range(self.r):
            start = int(np.nonzero(self.labels == c)[0][0])
            cyc = [start]
            v = int(self.successor[start])
            while v != start:
                cyc.append(v)
                v = int(self.successor[v])
            out.append(cyc)
        return out

    def __repr__(self):
        return f"CycleCover(n={self.n}, r={self.r})"


def parse_graph(text):
    """Parse the text graph format into a validated Graph.

    Format: first non-comment line is "n m", then m lines "u v" with
    0 <= u,v < n and u != v.  Lines starting with '#' are comments.
    Errors carry the 1-based line number.
    """
    n = m = None
    edges = []
    edge_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2:
                raise GraphFormatError("expected header 'n m'", line=lineno)
            try:
                n, m = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError("non-integer header", line=lineno) from None
            if n < 1 or m < 0:
                raise GraphFormatError("need n >= 1 and m >= 0", line=lineno)
            continue
        if len(parts) != 2:
            raise GraphFormatError("expected edge 'u v'", line=lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError("non-integer endpoint", line=lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"endpoint out of range 0..{n - 1}", line=lineno)
        if u == v:
            raise GraphFormatError("self-loop", line=lineno)
        edges.append((u, v))
        edge_lines.append(lineno)
    if n is None:
        raise GraphFormatError("empty input, expected header 'n m'")
    if len(edges) != m:
        raise GraphFormatError(f"header promised {m} edges, found {len(edges)}")
    # duplicate detection with the offending line number
    seen = {}
    for (u, v), lineno in zip(edges, edge_lines):
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise GraphFormatError(
                f"duplicate edge {key[0]} {key[1]} (first at line {seen[key]})",
                line=lineno,
            )
        seen[key] = lineno
    return Graph(n, np.array(edges, dtype=np.int64).reshape(-1, 2))


def format_graph(g, comment=None):
    """Render a Graph in canonical text form: u < v, edges ascending."""
    lines = []
    if comment:
        for c in comment.splitlines():
            lines.append(f"# {c}")
    lines.append(f"{g.n} {g.m}")
    if g.m:
        e = g.edges
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        order = np.lexsort((hi, lo))
        for i in order:
            lines.append(f"{lo[i]} {hi[i]}")
    return "\n".join(lines) + "\n"


def read_graph(path):
    with open(path, "r", encoding="ascii") as fh:
        return parse_graph(fh.read())


def write_graph(g, path, comment=None):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_graph(g, comment=comment))


def bidirect(g):
    """Replace each undirected edge by its two opposite arcs.

    Edge e becomes arcs 2e (stored orientation) and 2e+1 (reversed), so
    the source edge of arc a is a // 2.  The result is regular(k) when
    g is, and carries the arc -> source edge mapping.
    """
    e = g.edges
    m = g.m
    tails = np.empty(2 * m, dtype=np.int32)
    heads = np.empty(2 * m, dtype=np.int32)
    tails[0::2] = e[:, 0]
    heads[0::2] = e[:, 1]
    tails[1::2] = e[:, 1]
    heads[1::2] = e[:, 0]
    source = np.repeat(np.arange(m, dtype=np.int32), 2)
    return Digraph(g.n, tails, heads, source_edge=source, validate=False)


def cover_from_arcs(d, arc_ids):
    """Validate an arc-id set as a cycle cover of d and build the CycleCover.

    The set must contain exactly one arc leaving and one entering every
    vertex; anything else signals a bug in the caller and raises
    StructureError.
    """
    arc_ids = np.asarray(sorted(arc_ids), dtype=np.int64)
    pos = np.searchsorted(d.arc_ids, arc_ids)
    if np.any(pos >= d.m) or np.any(d.arc_ids[pos.clip(0, d.m - 1)] != arc_ids):
        raise StructureError("arc id not present in digraph")
    tails = d.tails[pos]
    heads = d.heads[pos]
    if len(arc_ids) != d.n:
        raise StructureError(
            f"cover needs exactly n={d.n} arcs, got {len(arc_ids)}"
        )
    outdeg = np.bincount(tails, minlength=d.n)
    if np.any(outdeg != 1):
        v = int(np.nonzero(outdeg != 1)[0][0])
        raise StructureError(f"vertex {v} has out-degree {int(outdeg[v])} in cover")
    indeg = np.bincount(heads, minlength=d.n)
    if np.any(indeg != 1):
        v = int(np.nonzero(indeg != 1)[0][0])
        raise StructureError(f"vertex {v} has in-degree {int(indeg[v])} in cover")
    successor = np.empty(d.n, dtype=np.int32)
    successor[tails] = heads
    labels = np.full(d.n, -1, dtype=np.int32)
    r = 0
    for s in range(d.n):
        if labels[s] >= 0:
            continue
        v = s
        while labels[v] < 0:
            labels[v] = r
            v = int(successor[v])
        r += 1
    return CycleCover(arc_ids, successor, r, labels)
