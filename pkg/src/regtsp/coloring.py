"""Randomized partition of a regular digraph's arcs into cycle covers.

The recursive scheme: randomly split every vertex in two (halving the
regularity), color the smaller-degree graph, fuse the vertex pairs back
so each color class becomes 2-regular, then walk each class's
alternating rings and recolor one ring class per fair coin into the
upper half of the color range.  Repeating down to regularity 1 and back
up yields k cycle covers.

The implementation is iterative and array-based.  Composing the random
vertex splits is equivalent to assigning each vertex's arcs to k leaf
slots by one uniform row shuffle (a shuffled row split in half and
re-shuffled recursively stays uniform), so the descent collapses into
two ``permuted`` calls; each ascent level is then a single pass over
per-slot tables, compiled in ``_kernels``.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import StructureError
from .graphs import CycleCover, Digraph, cover_from_arcs

__all__ = [
    "RngState",
    "CycleCoverColoring",
    "split_vertices",
    "fuse_vertices",
    "split_two_regular",
    "rand_cycle_cover_coloring",
    "best_cover",
]


class RngState:
    """Carrier for all randomness of the coloring pipeline.

    Draws happen in a fixed order (row shuffles first, then one block
    of flip bits per ascent level), so a seed determines the output
    coloring bit-for-bit.  ``draws`` counts the blocks consumed.
    """

    __slots__ = ("seed", "draws", "generator")

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.draws = 0
        self.generator = np.random.default_rng(self.seed)

    @classmethod
    def from_seedseq(cls, seedseq) -> "RngState":
        """Wrap a numpy SeedSequence, e.g. one spawned for a batch."""
        obj = object.__new__(cls)
        obj.seed = None
        obj.draws = 0
        obj.generator = np.random.default_rng(seedseq)
        return obj

    def permute_rows(self, mat: np.ndarray) -> np.ndarray:
        """Each row independently and uniformly shuffled."""
        self.draws += 1
        return self.generator.permuted(mat, axis=1)

    def flip_bits(self, count: int) -> np.ndarray:
        """A block of fair coin flips as uint8."""
        self.draws += 1
        return self.generator.integers(0, 2, size=count, dtype=np.uint8)

    def __repr__(self):
        return f"RngState(seed={self.seed}, draws={self.draws})"


class CycleCoverColoring:
    """Partition of a k-regular digraph's arcs into k cycle covers.

    ``colors`` is aligned with the digraph's positional arc arrays and
    1-based: colors[p] in 1..k is the color of the arc at position p.
    """

    __slots__ = ("digraph", "k", "colors")

    def __init__(self, digraph: Digraph, colors: np.ndarray):
        self.digraph = digraph
        self.k = digraph.require_regular("cycle cover coloring")
        self.colors = colors

    def color_of(self, arc_id: int) -> int:
        return int(self.colors[self.digraph.position_of(arc_id)])

    def arcs_of_color(self, color: int) -> np.ndarray:
        """Arc ids carrying the given 1-based color."""
        return self.digraph.arc_ids[self.colors == color]

    def cover(self, color: int) -> CycleCover:
        """One color class as a validated CycleCover."""
        return cover_from_arcs(self.digraph, self.arcs_of_color(color))

    def successor_table(self) -> np.ndarray:
        """Flattened (k, n) successor table; row c-1 is color c's permutation.

        Assumes validity; run validate() first when in doubt.
        """
        d = self.digraph
        succ = np.empty(self.k * d.n, dtype=np.int32)
        slot = (self.colors.astype(np.int64) - 1) * d.n + d.tails
        succ[slot] = d.heads
        return succ

    def cycle_counts(self) -> np.ndarray:
        """Cycle count of every color class, index c-1."""
        return _kernels.count_color_cycles(
            self.successor_table(), self.k, self.digraph.n
        )

    def histogram(self) -> dict[int, int]:
        """Map from cycle count r to how many classes have exactly r."""
        vals, freq = np.unique(self.cycle_counts(), return_counts=True)
        return {int(v): int(f) for v, f in zip(vals, freq)}

    def validate(self) -> None:
        """Assert every color class is a cycle cover; raise otherwise."""
        d = self.digraph
        if self.colors.shape != (d.m,):
            raise StructureError("color array length does not match arc count")
        if d.m and (self.colors.min() < 1 or self.colors.max() > self.k):
            raise StructureError(f"colors must lie in 1..{self.k}")
        base = (self.colors.astype(np.int64) - 1) * d.n
        for verts, kind in ((d.tails, "out"), (d.heads, "in")):
            deg = np.bincount(base + verts, minlength=self.k * d.n)
            bad = np.flatnonzero(deg != 1)
            if bad.size:
                s = int(bad[0])
                raise StructureError(
                    f"color {s // d.n + 1}: vertex {s % d.n} has "
                    f"{kind}-degree {int(deg[s])}, want 1"
                )

    def __repr__(self):
        return f"CycleCoverColoring(n={self.digraph.n}, k={self.k})"


def split_vertices(d: Digraph, rng: RngState) -> Digraph:
    """Randomly split every vertex into an even and an odd child.

    Vertex v becomes 2v and 2v+1; a uniformly random half of v's
    in-arcs is rerouted to 2v (the rest to 2v+1) and independently for
    the out-arcs.  Arc ids and positions are unchanged, so colors keyed
    on them survive.  The result is regular(k/2) on 2n vertices.
    """
    k = d.require_regular("vertex split")
    if k % 2:
        raise StructureError("vertex split needs even regularity")
    in_shuf = rng.permute_rows(_kernels.group_by_vertex(d.heads, d.n, k))
    out_shuf = rng.permute_rows(_kernels.group_by_vertex(d.tails, d.n, k))
    # raveled, the first k/2 entries of row v precede the second half,
    # so repeating each child id k/2 times lands halves on 2v and 2v+1
    owner = np.repeat(np.arange(2 * d.n, dtype=np.int32), k // 2)
    new_heads = np.empty(d.m, dtype=np.int32)
    new_tails = np.empty(d.m, dtype=np.int32)
    new_heads[in_shuf.ravel()] = owner
    new_tails[out_shuf.ravel()] = owner
    source = None if d.source_edge is None else d.source_edge.copy()
    return Digraph(
        2 * d.n, new_tails, new_heads,
        arc_ids=d.arc_ids.copy(), source_edge=source, validate=False,
    )


def fuse_vertices(h: Digraph) -> Digraph:
    """Merge child pairs 2w, 2w+1 back into w; inverse of split_vertices."""
    if h.n % 2:
        raise StructureError("fuse needs an even vertex count")
    source = None if h.source_edge is None else h.source_edge.copy()
    return Digraph(
        h.n // 2, h.tails >> 1, h.heads >> 1,
        arc_ids=h.arc_ids.copy(), source_edge=source, validate=False,
    )


def split_two_regular(d: Digraph) -> tuple[np.ndarray, np.ndarray]:
    """Partition a 2-regular digraph into its two canonical cycle covers.

    Walks the alternating rings: from an arc entering v, step to the
    other arc entering v, then to the other arc leaving that arc's
    tail, and so on until the ring closes.  Rings have even length and
    alternate arcs form the two classes; each class takes one arc of
    every in-pair and every out-pair, hence is a cycle cover.  Within
    each ring, the class containing the smallest arc id goes into the
    first returned set.
    """
    if d.require_regular("two-regular split") != 2:
        raise StructureError("split needs a 2-regular digraph")
    in_mat = _kernels.group_by_vertex(d.heads, d.n, 2)
    out_mat = _kernels.group_by_vertex(d.tails, d.n, 2)
    in_partner = np.empty(d.m, dtype=np.int64)
    out_partner = np.empty(d.m, dtype=np.int64)
    in_partner[in_mat[:, 0]] = in_mat[:, 1]
    in_partner[in_mat[:, 1]] = in_mat[:, 0]
    out_partner[out_mat[:, 0]] = out_mat[:, 1]
    out_partner[out_mat[:, 1]] = out_mat[:, 0]
    seen = np.zeros(d.m, dtype=bool)
    side = np.zeros(d.m, dtype=bool)
    # ascending arc id, so each ring is entered at its smallest id and
    # that id's class is the False side
    for p0 in np.argsort(d.arc_ids, kind="stable"):
        if seen[p0]:
            continue
        x = int(p0)
        while True:
            seen[x] = True
            y = int(in_partner[x])
            seen[y] = True
            side[y] = True
            z = int(out_partner[y])
            if z == p0:
                break
            x = z
    return np.sort(d.arc_ids[~side]), np.sort(d.arc_ids[side])


def rand_cycle_cover_coloring(
    d: Digraph,
    rng: RngState,
    *,
    flip_granularity: str = "cycle",
    debug_checks: bool = False,
) -> CycleCoverColoring:
    """Color a power-of-two-regular digraph's arcs into k cycle covers.

    See the module docstring for the scheme.  flip_granularity "cycle"
    (default) draws one fair bit per alternating ring; "component"
    coarsens to one bit per connected component of a color class,
    anchoring each ring at its smallest arc id — that mode runs on the
    python path and suits small inputs only.  debug_checks validates
    every intermediate level.
    """
    k = d.require_regular("cycle cover coloring")
    if k & (k - 1):
        raise StructureError(f"regularity must be a power of two, got {k}")
    if flip_granularity not in ("cycle", "component"):
        raise StructureError(f"unknown flip granularity {flip_granularity!r}")
    if k == 1:
        return CycleCoverColoring(d, np.ones(d.m, dtype=np.int32))
    if flip_granularity == "cycle":
        colors = _color_fast(d, rng, debug_checks)
    else:
        colors = _color_python(d, rng, debug_checks, per_component=True)
    return CycleCoverColoring(d, colors + 1)


def _leaf_assignment(d: Digraph, rng: RngState, k: int):
    """Random leaf slot per arc end: the collapsed descent.

    Returns (in_leaf, out_leaf, head_leaf, tail_leaf): the (n, k) slot
    tables (row v holds the arcs whose end lands in leaf v*k+j) and
    their inverses mapping arc position to leaf.
    """
    n, m = d.n, d.m
    in_leaf = rng.permute_rows(_kernels.group_by_vertex(d.heads, n, k))
    out_leaf = rng.permute_rows(_kernels.group_by_vertex(d.tails, n, k))
    head_leaf = np.empty(m, dtype=np.int32)
    tail_leaf = np.empty(m, dtype=np.int32)
    head_leaf[in_leaf.ravel()] = np.arange(m, dtype=np.int32)
    tail_leaf[out_leaf.ravel()] = np.arange(m, dtype=np.int32)
    return in_leaf, out_leaf, head_leaf, tail_leaf


def _color_fast(d: Digraph, rng: RngState, debug_checks: bool) -> np.ndarray:
    """Kernel-backed coloring run; returns 0-based colors per position.

    Builds the fat per-slot cells _kernels.ascend_level wants: each
    level's walk rewrites them for the next, and only the final level
    materializes colors.
    """
    k = d.require_regular("cycle cover coloring")
    levels = k.bit_length() - 1
    m = d.m
    in_leaf, out_leaf, head_leaf, tail_leaf = _leaf_assignment(d, rng, k)
    total = m // 2
    in_cells = np.empty((total, 4), dtype=np.int32)
    in_cells[:, :2] = in_leaf.reshape(total, 2)
    in_cells[:, 2:] = (tail_leaf[in_leaf.ravel()] >> 1).reshape(total, 2)
    out_cells = np.empty((total, 4), dtype=np.int32)
    out_cells[:, :2] = out_leaf.reshape(total, 2)
    out_cells[:, 2:] = (head_leaf[out_leaf.ravel()] >> 1).reshape(total, 2)
    del in_leaf, out_leaf

    colors = np.empty(m, dtype=np.int32)
    new_in = np.empty_like(in_cells)
    new_out = np.empty_like(out_cells)
    visited = np.empty(total, dtype=np.uint8)
    num_colors = 1
    for level in range(1, levels + 1):
        bits = rng.flip_bits(total)
        final = level == levels
        visited[:] = 0
        _kernels.ascend_level(
            in_cells, out_cells, bits, visited, new_in, new_out,
            colors, num_colors, final,
        )
        num_colors *= 2
        in_cells, new_in = new_in, in_cells
        out_cells, new_out = new_out, out_cells
        if debug_checks:
            if final:
                snapshot = colors
            else:
                # the color of every arc is its row block in the fresh table
                row_color = np.arange(total, dtype=np.int64) // (total // num_colors)
                snapshot = np.empty(m, dtype=np.int64)
                snapshot[in_cells[:, 0]] = row_color
                snapshot[in_cells[:, 1]] = row_color
            _check_level(d, snapshot, tail_leaf, head_leaf, num_colors,
                         level, levels)
    return colors


def _color_python(
    d: Digraph, rng: RngState, debug_checks: bool, per_component: bool,
) -> np.ndarray:
    """Reference coloring run on the python stepper; 0-based colors.

    With per_component False, consumes randomness identically to
    _color_fast and must reproduce its output exactly.
    """
    k = d.require_regular("cycle cover coloring")
    levels = k.bit_length() - 1
    m = d.m
    in_leaf, out_leaf, head_leaf, tail_leaf = _leaf_assignment(d, rng, k)
    colors = np.zeros(m, dtype=np.int32)
    inpair = in_leaf.reshape(m // 2, 2)
    outpair = out_leaf.reshape(m // 2, 2)
    new_inpair = np.empty_like(inpair)
    new_outpair = np.empty_like(outpair)
    num_colors = 1
    for level in range(1, levels + 1):
        bits = rng.flip_bits(m // 2)
        final = level == levels
        _ascend_level_py(
            inpair, outpair, tail_leaf, head_leaf, colors, bits,
            new_inpair, new_outpair, num_colors, level, final,
            d.arc_ids, per_component=per_component,
        )
        num_colors *= 2
        inpair, new_inpair = new_inpair, inpair
        outpair, new_outpair = new_outpair, outpair
        if debug_checks:
            _check_level(d, colors, tail_leaf, head_leaf, num_colors,
                         level, levels)
    return colors


def best_cover(col: CycleCoverColoring) -> tuple[int, CycleCover]:
    """The color class with the fewest cycles, lowest color on ties."""
    counts = col.cycle_counts()
    color = int(np.argmin(counts)) + 1
    return color, col.cover(color)


def _ascend_level_py(
    inpair, outpair, tail_leaf, head_leaf, colors, bits,
    new_inpair, new_outpair, num_colors, shift, final,
    arc_ids, per_component,
):
    """Pure-python mirror of _kernels.ascend_level.

    With per_component False this consumes bits and writes output
    identically to the kernel (tests rely on that).  With it True, all
    rings in one connected component of a color class share a single
    bit, and each ring's first set is the class of its smallest arc id.
    Returns the number of bits consumed.
    """
    total = inpair.shape[0]
    verts_half = total // num_colors
    half_next = verts_half >> 1
    visited = np.zeros(total, dtype=bool)

    # pass 1: trace rings without touching the output arrays
    rings = []
    ring_of_in = np.full(total, -1, dtype=np.int64)
    ring_of_out = np.full(total, -1, dtype=np.int64)
    for s0 in range(total):
        if visited[s0]:
            continue
        idx = len(rings)
        c = s0 // verts_half
        base = c * verts_half
        in_steps = []
        out_steps = []
        x = int(inpair[s0, 0])
        y = int(inpair[s0, 1])
        s = s0
        while True:
            visited[s] = True
            ring_of_in[s] = idx
            in_steps.append((s - base, x, y))
            u = int(tail_leaf[y]) >> shift
            t = base + u
            z = int(outpair[t, 1]) if int(outpair[t, 0]) == y else int(outpair[t, 0])
            ring_of_out[t] = idx
            out_steps.append((u, y, z))
            nxt = base + (int(head_leaf[z]) >> shift)
            if nxt == s0:
                break
            s = nxt
            x = z
            y = int(inpair[s, 1]) if int(inpair[s, 0]) == z else int(inpair[s, 0])
        rings.append((c, in_steps, out_steps))

    # pass 2: one bit per ring, or one per merged component
    if per_component:
        parent = list(range(len(rings)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for s in range(total):
            ra, rb = find(int(ring_of_in[s])), find(int(ring_of_out[s]))
            if ra != rb:
                parent[rb] = ra
        comp_bit = {}
        used = 0
        move_entry = []
        for i, (c, in_steps, out_steps) in enumerate(rings):
            root = find(i)
            if root not in comp_bit:
                comp_bit[root] = int(bits[used])
                used += 1
            b = comp_bit[root]
            # anchor: does the ring's smallest arc id sit in the entry
            # class (the x side)?  bit set recolors the anchored class.
            best_id = None
            anchor_entry = True
            for _, x, y in in_steps:
                if best_id is None or arc_ids[x] < best_id:
                    best_id = arc_ids[x]
                    anchor_entry = True
                if arc_ids[y] < best_id:
                    best_id = arc_ids[y]
                    anchor_entry = False
            move_entry.append((b == 1) == anchor_entry)
    else:
        used = len(rings)
        move_entry = [int(bits[i]) == 1 for i in range(used)]

    # pass 3: recolor and write the next level's tables
    for i, (c, in_steps, out_steps) in enumerate(rings):
        stay_base = c * half_next
        move_base = (c + num_colors) * half_next
        entry_moves = move_entry[i]
        for w, x, y in in_steps:
            mover, stayer = (x, y) if entry_moves else (y, x)
            colors[mover] += num_colors
            if not final:
                new_inpair[stay_base + (w >> 1), w & 1] = stayer
                new_inpair[move_base + (w >> 1), w & 1] = mover
        if not final:
            for u, y, z in out_steps:
                row, col = u >> 1, u & 1
                if entry_moves:
                    new_outpair[stay_base + row, col] = y
                    new_outpair[move_base + row, col] = z
                else:
                    new_outpair[move_base + row, col] = y
                    new_outpair[stay_base + row, col] = z
    return used


def _check_level(d, colors, tail_leaf, head_leaf, num_colors, level, levels):
    # after `level` ascents the working graph has n << (levels-level)
    # vertices; every (color, vertex) must have out- and in-degree 1
    nf = d.n << (levels - level)
    base = colors.astype(np.int64) * nf
    for leaf in (tail_leaf, head_leaf):
        deg = np.bincount(base + (leaf >> level), minlength=num_colors * nf)
        if not np.all(deg == 1):
            raise StructureError(
                f"internal coloring level {level}: a color class is not "
                f"a cycle cover"
            )
