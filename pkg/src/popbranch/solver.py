"""The popular-arborescence solver.

Pipeline per instance:

1. per-vertex reach sets: iterate "vertices reachable through safe edges"
   from full vertex set down to a fixpoint;
2. maximal family: the maximal reach sets partition the vertex set; each
   member carries its bottom component (the source component of its safe
   subgraph) and the minimum-weight vertices therein, which are the only
   admissible entry points;
3. entry blockers: if for some member every candidate entry vertex can be
   undercut by a strictly lighter vertex rerouted through one non-safe
   edge, no popular arborescence exists;
4. contraction: one node per family member, arcs from undominated external
   edges into unblocked entry candidates; any root arborescence of the
   contraction expands to a popular arborescence of the instance, together
   with an LP-duality certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .augment import (
    Arborescence,
    AugmentedDigraph,
    augment,
    check_weight_assumption,
    spanning_out_tree,
)
from .errors import InternalError, LaminarityViolation
from .graph import Digraph, reachable_from, scc_partition
from .safe_edges import safe_edges, safe_out_adjacency

#: Full pairwise laminarity of the reach-set family is asserted per solve
#: only up to this many vertices; the partition property (a laminarity
#: consequence) is asserted always.  Above the limit the deep check would
#: dominate the running time.
DEEP_CHECK_LIMIT = 64

POPULAR_FOUND = "popular_found"
NONE_EXISTS = "none_exists"
ASSUMPTION_VIOLATED = "assumption_violated"


@dataclass(frozen=True)
class ReachSet:
    """Fixpoint of iterated safe-edge reachability from one vertex.

    ``history`` starts at the full vertex set and strictly shrinks down to
    ``members``, the largest set in which the vertex reaches everything
    through safe edges.
    """

    vertex: str
    members: frozenset[str]
    history: tuple[frozenset[str], ...]


def compute_reach_set(d: AugmentedDigraph, vertex: str) -> ReachSet:
    """Reach set of a single vertex (quadratic in the worst case)."""
    full = frozenset(d.graph_vertices)
    return _shrink_to_fixpoint(d, vertex, full, [full])


def _shrink_to_fixpoint(d, vertex, start, history):
    # Equivalent to iterating safe_edges + reachable_from, but computes the
    # safe adjacency directly, which dominates the solver's running time.
    x = start
    while True:
        adj = safe_out_adjacency(d, x)
        seen = {vertex}
        stack = [vertex]
        while stack:
            u = stack.pop()
            for w in adj.get(u, ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) == len(x):
            break
        x = frozenset(seen)
        history.append(x)
    return ReachSet(vertex, x, tuple(history))


def all_reach_sets(d: AugmentedDigraph) -> dict[str, ReachSet]:
    """Reach sets for every vertex.

    The first iteration is shared: the safe edges of the full vertex set
    and the reachability closure of their condensation are computed once,
    which answers round zero for all vertices in O(m + n^2/64) instead of
    n separate traversals.  Results are identical to per-vertex calls.
    """
    verts = d.graph_vertices
    if not verts:
        return {}
    full = frozenset(verts)
    s0 = safe_edges(d, full)
    comps, _ = scc_partition(d, full, s0)
    comp_of = {v: ci for ci, comp in enumerate(comps) for v in comp}
    succ: list[set[int]] = [set() for _ in comps]
    for eid in s0:
        e = d.edges[eid]
        a, b = comp_of[e.src], comp_of[e.dst]
        if a != b:
            succ[a].add(b)
    # Tarjan emits components after all their successors, so a single
    # forward pass over the emission order closes the reachability.
    closure: list[frozenset[str]] = [frozenset()] * len(comps)
    for ci, comp in enumerate(comps):
        acc = set(comp)
        for cj in succ[ci]:
            if cj >= ci:
                raise InternalError("condensation order violated")
            acc.update(closure[cj])
        closure[ci] = frozenset(acc)

    result: dict[str, ReachSet] = {}
    for v in verts:
        x1 = closure[comp_of[v]]
        if x1 == full:
            result[v] = ReachSet(v, full, (full,))
        else:
            result[v] = _shrink_to_fixpoint(d, v, x1, [full, x1])
    return result


@dataclass(frozen=True)
class FamilyMember:
    """One maximal reach set with its entry structure.

    ``bottom`` is the unique source component of (members, safe); no safe
    edge enters it, so any arborescence must enter the member there.
    ``entry_candidates`` are its minimum-weight vertices, sorted.
    """

    members: frozenset[str]
    safe: frozenset[str]
    bottom: frozenset[str]
    entry_candidates: tuple[str, ...]


@dataclass(frozen=True)
class MaximalFamily:
    members: tuple[FamilyMember, ...]
    member_of: dict[str, int] = field(compare=False)

    def __len__(self):
        return len(self.members)


def maximal_family(d: AugmentedDigraph,
                   reach_sets: dict[str, ReachSet]) -> MaximalFamily:
    """The maximal reach sets, each with bottom component and candidates.

    Verifies the partition property: the maximal sets must be pairwise
    disjoint and cover every vertex.  A failure means the reach-set family
    is not laminar, which indicates a solver bug.
    """
    distinct = {rs.members for rs in reach_sets.values()}
    maximal: list[frozenset[str]] = []
    covered: set[str] = set()
    for x in sorted(distinct, key=lambda s: (-len(s), min(s))):
        if covered.isdisjoint(x):
            maximal.append(x)
            covered.update(x)
        elif not x <= covered:
            raise LaminarityViolation(
                f"reach set {sorted(x)} overlaps the maximal family")
    if covered != set(d.graph_vertices):
        raise LaminarityViolation("maximal reach sets do not cover the graph")

    members: list[FamilyMember] = []
    for x in sorted(maximal, key=min):
        s = safe_edges(d, x)
        comps, indeg = scc_partition(d, x, s)
        sources = [c for c, deg in zip(comps, indeg) if deg == 0]
        if len(sources) != 1:
            raise InternalError(
                f"expected a unique source component in a reach set, "
                f"found {len(sources)}")
        bottom = sources[0]
        wmin = min(d.weight[u] for u in bottom)
        cands = tuple(sorted(u for u in bottom if d.weight[u] == wmin))
        members.append(FamilyMember(x, s, bottom, cands))
    member_of = {v: i for i, m in enumerate(members) for v in m.members}
    return MaximalFamily(tuple(members), member_of)


def check_reach_laminarity(reach_sets: dict[str, ReachSet]) -> None:
    """Exhaustive laminarity check of the reach-set family.

    Any two reach sets must be nested or disjoint, and membership must
    imply containment (u in X_v forces X_u inside X_v).  Quadratic; meant
    for small instances and tests.
    """
    items = sorted(reach_sets.values(), key=lambda rs: rs.vertex)
    for i, a in enumerate(items):
        for b in items[i + 1:]:
            x, y = a.members, b.members
            if not (x <= y or y <= x or x.isdisjoint(y)):
                raise LaminarityViolation(
                    f"reach sets of {a.vertex!r} and {b.vertex!r} overlap")
    for rs in items:
        for u in rs.members:
            if not reach_sets[u].members <= rs.members:
                raise LaminarityViolation(
                    f"{u!r} lies in the reach set of {rs.vertex!r} but its "
                    f"own reach set is not contained in it")


@dataclass(frozen=True)
class EntryBlocker:
    """Witness that entering a member at ``vertex`` can never be popular.

    ``lighter_vertex`` sits outside the bottom component, weighs strictly
    less than ``vertex``, and can reach it through the safe edges plus the
    single non-safe ``bypass_edge``, which itself strictly beats every
    boundary edge into ``vertex``.  Rerouting through it always wins the
    weighted vote.
    """

    vertex: str
    lighter_vertex: str
    bypass_edge: str


def find_entry_blocker(
    d: AugmentedDigraph,
    members: frozenset[str],
    bottom: frozenset[str],
    vertex: str,
    safe: frozenset[str] | None = None,
) -> EntryBlocker | None:
    """Search for a blocker of ``vertex`` (a minimum-weight bottom vertex).

    Candidate lighter vertices are scanned by ascending (weight, id) and
    bypass edges by id; the first hit is returned, so results are
    deterministic.  Returns None when no blocker exists.
    """
    if safe is None:
        safe = safe_edges(d, members)
    wv = d.weight[vertex]
    candidates = sorted(
        (s for s in members - bottom if d.weight[s] < wv),
        key=lambda s: (d.weight[s], s),
    )
    if not candidates:
        return None
    boundary_best = min(
        d.rank[eid] for eid in d.in_edges[vertex]
        if d.edges[eid].src not in members
    )
    bypass = [
        eid for eid in d.in_edges[vertex]
        if eid not in safe
        and d.edges[eid].src in members
        and d.rank[eid] < boundary_best
    ]
    if not bypass:
        return None

    rev: dict[str, list[str]] = {}
    for eid in safe:
        e = d.edges[eid]
        rev.setdefault(e.dst, []).append(e.src)

    reach_cache: dict[str, frozenset[str]] = {}

    def reaches_back(target: str) -> frozenset[str]:
        got = reach_cache.get(target)
        if got is None:
            seen = {target}
            stack = [target]
            while stack:
                v = stack.pop()
                for u in rev.get(v, ()):
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
            got = reach_cache[target] = frozenset(seen)
        return got

    to_vertex = reaches_back(vertex)
    for s in candidates:
        for eid in bypass:
            if s in to_vertex or s in reaches_back(d.edges[eid].src):
                return EntryBlocker(vertex, s, eid)
    return None


@dataclass(frozen=True)
class BlockedComponent:
    """Nonexistence evidence: every entry candidate of a member is blocked."""

    members: frozenset[str]
    entry_candidates: tuple[str, ...]
    blockers: tuple[EntryBlocker, ...]


@dataclass(frozen=True)
class ContractionUnreachable:
    """Nonexistence evidence: the contracted digraph has no root arborescence."""


@dataclass(frozen=True)
class ContractedArc:
    """Arc of the contracted digraph; ``src`` None means the root."""

    src: int | None
    dst: int
    payload: str


@dataclass(frozen=True)
class ContractedDigraph:
    family: MaximalFamily
    arcs: tuple[ContractedArc, ...]


def build_contracted(
    d: AugmentedDigraph, family: MaximalFamily
) -> ContractedDigraph | BlockedComponent:
    """Contract the family members, or report a fully blocked member.

    Arcs are added only for entry candidates without a blocker: admitting
    a blocked candidate could select an arborescence that the blocker's
    reroute then beats.  An external edge becomes an arc iff no boundary
    edge into the same candidate strictly beats it (ties are kept).
    If every candidate of some member is blocked, no popular arborescence
    exists and the blockers are returned as evidence.
    """
    arcs: list[ContractedArc] = []
    for xi, member in enumerate(family.members):
        blockers = {
            v: find_entry_blocker(d, member.members, member.bottom, v,
                                  safe=member.safe)
            for v in member.entry_candidates
        }
        if all(b is not None for b in blockers.values()):
            return BlockedComponent(
                member.members,
                member.entry_candidates,
                tuple(blockers[v] for v in member.entry_candidates),
            )
        for v in member.entry_candidates:
            if blockers[v] is not None:
                continue
            external = [
                eid for eid in d.in_edges[v]
                if d.edges[eid].src not in member.members
            ]
            best = min(d.rank[eid] for eid in external)
            for eid in external:
                if d.rank[eid] != best:
                    continue
                u = d.edges[eid].src
                src = None if u == d.root else family.member_of[u]
                arcs.append(ContractedArc(src, xi, eid))
    return ContractedDigraph(family, tuple(arcs))


def find_r_arborescence(
    contracted: ContractedDigraph,
) -> dict[int, ContractedArc] | None:
    """A spanning in-arc selection of the contraction, or None.

    BFS from the root with arcs taken in sorted payload-id order; returns
    the chosen in-arc per member index.
    """
    adj: dict[int | None, list[ContractedArc]] = {}
    for arc in contracted.arcs:
        adj.setdefault(arc.src, []).append(arc)
    for lst in adj.values():
        lst.sort(key=lambda a: a.payload)
    chosen: dict[int, ContractedArc] = {}
    order: list[int | None] = [None]
    seen: set[int | None] = {None}
    i = 0
    while i < len(order):
        node = order[i]
        i += 1
        for arc in adj.get(node, ()):
            if arc.dst not in seen:
                seen.add(arc.dst)
                chosen[arc.dst] = arc
                order.append(arc.dst)
    if len(chosen) < len(contracted.family.members):
        return None
    return chosen


def expand(
    d: AugmentedDigraph,
    family: MaximalFamily,
    chosen: dict[int, ContractedArc],
    reach_sets: dict[str, ReachSet] | None = None,
) -> Arborescence:
    """Expand chosen arcs into a full arborescence.

    Each member with two or more vertices is filled in with a
    deterministic safe-edge out-tree rooted at its entry vertex.  When the
    reach sets are supplied, the entry vertex's own reach set must equal
    the member it enters; a mismatch is an internal error.
    """
    edge_of: dict[str, str] = {}
    for xi, member in enumerate(family.members):
        arc = chosen[xi]
        entry_vertex = d.edges[arc.payload].dst
        edge_of[entry_vertex] = arc.payload
        if len(member.members) >= 2:
            if reach_sets is not None:
                rs = reach_sets[entry_vertex]
                if rs.members != member.members:
                    raise InternalError(
                        f"entry vertex {entry_vertex!r} has reach set "
                        f"{sorted(rs.members)} but enters {sorted(member.members)}")
            edge_of.update(
                spanning_out_tree(d, member.members, member.safe,
                                  entry_vertex))
    arb = Arborescence(d, edge_of)
    for member in family.members:
        for v in member.members:
            eid = arb.edge_of[v]
            if d.edges[eid].src in member.members and eid not in member.safe:
                raise InternalError(
                    f"expansion used the non-safe interior edge {eid!r}")
    return arb


@dataclass(frozen=True)
class SolveOutcome:
    """Result of a solve.

    ``status`` is one of popular_found, none_exists, assumption_violated.
    A popular_found outcome always carries a certificate that has already
    been verified.  ``assumption_violation`` is set whenever the weight
    condition fails, including on forced runs that solved anyway.
    """

    status: str
    arborescence: Arborescence | None = None
    certificate: object | None = None
    reason: BlockedComponent | ContractionUnreachable | None = None
    assumption_violation: tuple[str, str, str] | None = None


@dataclass(frozen=True)
class SolveTrace:
    """Solve outcome plus the intermediate structures, for inspection."""

    augmented: AugmentedDigraph
    reach_sets: dict[str, ReachSet] | None
    family: MaximalFamily | None
    contracted: ContractedDigraph | None
    chosen: dict[int, ContractedArc] | None
    outcome: SolveOutcome


def solve_with_trace(g: Digraph, *, force: bool = False) -> SolveTrace:
    """Run the full pipeline and keep the intermediate structures."""
    from .certificate import build_certificate, verify_feasible, \
        verify_popularity

    ok, triple = check_weight_assumption(g.weight)
    violation = None if ok else triple
    d = augment(g)
    if not ok and not force:
        return SolveTrace(d, None, None, None, None, SolveOutcome(
            ASSUMPTION_VIOLATED, assumption_violation=triple))

    reach = all_reach_sets(d)
    if len(g.vertices) <= DEEP_CHECK_LIMIT:
        check_reach_laminarity(reach)
    family = maximal_family(d, reach)
    contracted = build_contracted(d, family)
    if isinstance(contracted, BlockedComponent):
        return SolveTrace(d, reach, family, None, None, SolveOutcome(
            NONE_EXISTS, reason=contracted,
            assumption_violation=violation))
    chosen = find_r_arborescence(contracted)
    if chosen is None:
        return SolveTrace(d, reach, family, contracted, None, SolveOutcome(
            NONE_EXISTS, reason=ContractionUnreachable(),
            assumption_violation=violation))
    arb = expand(d, family, chosen, reach)
    cert = build_certificate(d, family, arb)
    for report in (verify_feasible(d, arb, cert),
                   verify_popularity(d, arb, cert)):
        if not report.ok:
            raise InternalError(
                "constructed certificate failed verification: "
                + "; ".join(c.name for c in report.failures()))
    outcome = SolveOutcome(POPULAR_FOUND, arborescence=arb, certificate=cert,
                           assumption_violation=violation)
    return SolveTrace(d, reach, family, contracted, chosen, outcome)


def solve(g: Digraph, *, force: bool = False) -> SolveOutcome:
    """Find a popular arborescence of the instance, or prove none exists.

    Rejects instances violating the weight condition unless ``force`` is
    set; forced runs still record the violating triple.  On success the
    outcome carries a verified duality certificate.
    """
    return solve_with_trace(g, force=force).outcome
