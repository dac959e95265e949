"""Popular arborescences in vertex-weighted digraphs.

Find a spanning out-tree that no other one beats in a weighted per-vertex
vote over in-edge preferences (total preorders, given as integer ranks),
produce a machine-checkable LP-duality certificate of that fact, and
verify results against independent oracles.
"""

from .augment import (
    Arborescence,
    AugmentedDigraph,
    augment,
    check_weight_assumption,
    edge_cost,
    popularity_margin,
    total_cost,
)
from .certificate import (
    DualSet,
    DualSolution,
    Report,
    build_certificate,
    verify_feasible,
    verify_popularity,
)
from .errors import (
    CapExceeded,
    DuplicateId,
    HeadMismatch,
    InstanceError,
    InternalError,
    LaminarityViolation,
    MissingRank,
    MissingWeight,
    NonpositiveWeight,
    PopbranchError,
    SchemaError,
    SelfLoop,
    UnknownEndpoint,
)
from .generate import GenParams, generate_random
from .graph import (
    ROOT,
    Comparison,
    Digraph,
    Edge,
    build_digraph,
    compare,
    dominates,
    reachable_from,
    scc_partition,
)
from .instance_io import (
    parse_instance,
    parse_result,
    serialize_instance,
    serialize_result,
    to_dot,
)
from .oracle import (
    PopularityVerdict,
    brute_popular_set,
    enumerate_arborescences,
    find_popular_arborescence,
    is_popular_exact,
    min_cost_arborescence,
)
from .safe_edges import safe_edges
from .solver import (
    ASSUMPTION_VIOLATED,
    NONE_EXISTS,
    POPULAR_FOUND,
    BlockedComponent,
    ContractionUnreachable,
    EntryBlocker,
    MaximalFamily,
    ReachSet,
    SolveOutcome,
    all_reach_sets,
    build_contracted,
    compute_reach_set,
    expand,
    find_entry_blocker,
    find_r_arborescence,
    maximal_family,
    solve,
    solve_with_trace,
)

__version__ = "0.1.0"
