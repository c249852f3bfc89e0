"""TSP approximation on k-regular graphs.

Two pipelines produce tours with additive-style guarantees on the
shortest-path metric of an unweighted connected regular graph: a
randomized one built on cycle cover colorings of the bidirected graph,
and a deterministic one built on vertex-disjoint long cycles.  Exact
small-instance oracles back both up.
"""

from .coloring import (
    CycleCoverColoring,
    RngState,
    best_cover,
    rand_cycle_cover_coloring,
)
from .decompose import decompose_matchings, regular_subgraph
from .errors import GraphFormatError, StructureError
from .generators import (
    circulant_graph,
    complete_graph,
    cycle_graph,
    hypercube_graph,
    named_graph,
    petersen_graph,
    random_regular_graph,
)
from .graphs import (
    CycleCover,
    Digraph,
    Graph,
    bidirect,
    cover_from_arcs,
    format_graph,
    parse_graph,
    read_graph,
    write_graph,
)
from .longcycles import (
    LongCyclesResult,
    cycle_length_threshold,
    deterministic_tsp,
    long_cycles,
)
from .oracles import (
    brute_force_optimum,
    coloring_distribution_check,
    coloring_prob_exact,
    coloring_prob_log_bound,
    covers_by_cycle_count,
    cycle_cover_count_bound,
    cycle_count_threshold,
    enumerate_cycle_covers,
    held_karp_optimum,
    metric_closure,
)
from .tours import (
    Tour,
    contract_components,
    doubled_tree_tsp,
    euler_shortcut,
    exact_tour_cost,
    randomized_tsp,
    spanning_tree,
)

__version__ = "0.1.0"

__all__ = [
    "CycleCover",
    "CycleCoverColoring",
    "Digraph",
    "Graph",
    "GraphFormatError",
    "LongCyclesResult",
    "RngState",
    "StructureError",
    "Tour",
    "best_cover",
    "bidirect",
    "brute_force_optimum",
    "circulant_graph",
    "coloring_distribution_check",
    "coloring_prob_exact",
    "coloring_prob_log_bound",
    "complete_graph",
    "contract_components",
    "cover_from_arcs",
    "covers_by_cycle_count",
    "cycle_cover_count_bound",
    "cycle_count_threshold",
    "cycle_graph",
    "cycle_length_threshold",
    "decompose_matchings",
    "deterministic_tsp",
    "doubled_tree_tsp",
    "enumerate_cycle_covers",
    "euler_shortcut",
    "exact_tour_cost",
    "format_graph",
    "held_karp_optimum",
    "hypercube_graph",
    "long_cycles",
    "metric_closure",
    "named_graph",
    "parse_graph",
    "petersen_graph",
    "rand_cycle_cover_coloring",
    "random_regular_graph",
    "randomized_tsp",
    "read_graph",
    "regular_subgraph",
    "spanning_tree",
    "write_graph",
]
