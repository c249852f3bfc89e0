"""Instance generators: random regular graphs and named families."""

from __future__ import annotations

import numpy as np

from .errors import StructureError
from .graphs import Graph

__all__ = [
    "random_regular_graph",
    "cycle_graph",
    "complete_graph",
    "hypercube_graph",
    "circulant_graph",
    "petersen_graph",
    "named_graph",
    "NAMED_FAMILIES",
]


def _pair_stubs(n, k, rng, max_rounds=400):
    """One pairing-model attempt; returns an (m, 2) edge array or None.

    Pairs all n*k half-edge stubs at once, keeps the pairs that are
    neither self-loops nor repeats, then reshuffles and re-pairs only
    the leftover stubs until none remain.  Gives up (None) when a round
    limit is hit, which happens with noticeable probability only for
    near-complete parameter choices.
    """
    stubs = np.repeat(np.arange(n, dtype=np.int64), k)
    rng.shuffle(stubs)
    edge_keys = np.empty(0, dtype=np.int64)
    for _ in range(max_rounds):
        u = stubs[0::2]
        v = stubs[1::2]
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        key = lo * n + hi
        good = lo != hi
        if good.any():
            # repeats within this round and against already-kept edges
            order = np.argsort(key, kind="stable")
            sk = key[order]
            first = np.ones(len(sk), dtype=bool)
            first[1:] = sk[1:] != sk[:-1]
            is_first = np.empty(len(key), dtype=bool)
            is_first[order] = first
            good &= is_first
            if edge_keys.size:
                good &= ~np.isin(key, edge_keys, assume_unique=False)
        if good.any():
            edge_keys = np.concatenate([edge_keys, key[good]])
        bad = ~good
        if not bad.any():
            edges = np.empty((len(edge_keys), 2), dtype=np.int64)
            edges[:, 0] = edge_keys // n
            edges[:, 1] = edge_keys % n
            return edges
        stubs = np.concatenate([u[bad], v[bad]])
        rng.shuffle(stubs)
    return None


def random_regular_graph(n, k, seed, retry_cap=1000):
    """Sample a simple connected k-regular graph via the pairing model.

    Half-edge stubs are paired uniformly; colliding pairs (self-loops,
    repeated edges) are released and re-paired until the graph is
    simple.  Disconnected outcomes are rejected and the whole sample is
    retried, up to ``retry_cap`` attempts.

    Requires 3 <= k < n and n*k even.
    """
    n, k = int(n), int(k)
    if k < 3:
        raise ValueError("need k >= 3 (2-regular graphs are the cycle family)")
    if k >= n:
        raise ValueError("need k < n for a simple graph")
    if (n * k) % 2 != 0:
        raise ValueError(f"n*k = {n * k} is odd, no {k}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    for _ in range(retry_cap):
        edges = _pair_stubs(n, k, rng)
        if edges is None:
            continue
        g = Graph(n, edges)
        assert g.regularity == k
        if g.is_connected():
            return g
    raise StructureError(
        f"random_regular_graph(n={n}, k={k}) exceeded {retry_cap} attempts; "
        "parameters are likely pathological (near-complete or near-disconnected)"
    )


def cycle_graph(n):
    """The n-cycle, regular(2); needs n >= 3."""
    n = int(n)
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    i = np.arange(n, dtype=np.int64)
    return Graph(n, np.column_stack([i, (i + 1) % n]))


def complete_graph(q):
    """K_q, regular(q-1); needs q >= 2."""
    q = int(q)
    if q < 2:
        raise ValueError("complete graph needs q >= 2")
    iu = np.triu_indices(q, k=1)
    return Graph(q, np.column_stack(iu))


def hypercube_graph(dim):
    """The dim-dimensional hypercube on 2**dim vertices, regular(dim)."""
    dim = int(dim)
    if dim < 1:
        raise ValueError("hypercube needs dim >= 1")
    n = 1 << dim
    v = np.arange(n, dtype=np.int64)
    edges = []
    for b in range(dim):
        w = v ^ (1 << b)
        mask = v < w
        edges.append(np.column_stack([v[mask], w[mask]]))
    return Graph(n, np.concatenate(edges))


def circulant_graph(n, offsets):
    """Circulant graph: i ~ i +/- s (mod n) for each offset s.

    Offsets must be distinct in 1..n//2.  An offset equal to n/2 (even
    n) contributes degree 1, every other offset degree 2.
    """
    n = int(n)
    offsets = sorted({int(s) for s in offsets})
    if n < 3:
        raise ValueError("circulant needs n >= 3")
    if not offsets:
        raise ValueError("need at least one offset")
    if offsets[0] < 1 or offsets[-1] > n // 2:
        raise ValueError(f"offsets must lie in 1..{n // 2}")
    i = np.arange(n, dtype=np.int64)
    chunks = []
    for s in offsets:
        j = (i + s) % n
        if 2 * s == n:
            mask = i < j
            chunks.append(np.column_stack([i[mask], j[mask]]))
        else:
            chunks.append(np.column_stack([i, j]))
    return Graph(n, np.concatenate(chunks))


def petersen_graph():
    """The Petersen graph: 10 vertices, 15 edges, regular(3), girth 5."""
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, np.array(outer + spokes + inner, dtype=np.int64))


NAMED_FAMILIES = ("cycle", "complete", "hypercube", "circulant", "petersen")


def named_graph(family, **params):
    """Dispatch a named family by string, for the CLI and corpus tooling."""
    if family == "cycle":
        return cycle_graph(params["n"])
    if family == "complete":
        return complete_graph(params["q"])
    if family == "hypercube":
        return hypercube_graph(params["dim"])
    if family == "circulant":
        return circulant_graph(params["n"], params["offsets"])
    if family == "petersen":
        return petersen_graph()
    raise ValueError(f"unknown family {family!r}, expected one of {NAMED_FAMILIES}")
