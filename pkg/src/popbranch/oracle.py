"""Independent ground truth for popularity.

Two routes that must agree wherever both run:

* exhaustive enumeration of all root arborescences plus pairwise margin
  evaluation (the literal definition of popularity), and
* a contraction-based min-cost arborescence search, which decides
  popularity in polynomial time because an arborescence is popular
  exactly when it is min-cost under its own relative cost function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from .augment import (
    Arborescence,
    AugmentedDigraph,
    edge_cost,
    popularity_margin,
)
from .errors import CapExceeded, InternalError


def enumerate_arborescences(
    d: AugmentedDigraph, cap: int | None = None
) -> Iterator[Arborescence]:
    """Yield every root arborescence of ``d`` exactly once.

    Backtracks over per-vertex in-edge choices in sorted order, pruning a
    choice as soon as it closes a cycle among already-fixed edges, so the
    output order is deterministic.  The count can be exponential; if
    ``cap`` is given, raises CapExceeded on producing item cap + 1.
    """
    verts = d.graph_vertices
    n = len(verts)
    tail = {eid: d.edges[eid].src for eid in d.edges}
    in_lists = [d.in_edges[v] for v in verts]
    parent: dict[str, str] = {}
    choice: dict[str, str] = {}
    count = 0

    def closes_cycle(u: str, v: str) -> bool:
        # Walk already-assigned parents upward from u; a cycle through the
        # new edge (u, v) exists iff the walk reaches v.
        x = u
        while True:
            if x == v:
                return True
            nxt = parent.get(x)
            if nxt is None:
                return False
            x = nxt

    def rec(i: int) -> Iterator[Arborescence]:
        nonlocal count
        if i == n:
            count += 1
            if cap is not None and count > cap:
                raise CapExceeded(
                    f"more than {cap} arborescences in the instance")
            yield Arborescence._trusted(dict(choice))
            return
        v = verts[i]
        for eid in in_lists[i]:
            u = tail[eid]
            if closes_cycle(u, v):
                continue
            parent[v] = u
            choice[v] = eid
            yield from rec(i + 1)
            del parent[v]
            del choice[v]

    return rec(0)


def _find_cycle(parent: dict[int, int]) -> list[int] | None:
    """A cycle in the functional graph v -> parent[v], or None."""
    state: dict[int, int] = {}
    for start in sorted(parent):
        if start in state:
            continue
        path: list[int] = []
        x = start
        while True:
            st = state.get(x, 0)
            if st == 1:
                return path[path.index(x):]
            if st == 2 or x not in parent:
                break
            state[x] = 1
            path.append(x)
            x = parent[x]
        for y in path:
            state[y] = 2
    return None


def min_cost_arborescence(
    d: AugmentedDigraph, costs: Mapping[str, int]
) -> tuple[Arborescence, int]:
    """A minimum-total-cost root arborescence and its cost.

    Classical cycle-contraction scheme: repeatedly pick the cheapest
    in-edge of every vertex (ties broken by edge id), contract any cycle
    this forms while discounting its entering edges, then expand the
    contractions in reverse.  Costs must be non-negative; every vertex is
    reachable thanks to the root edges.  O(mn) worst case.
    """
    verts = d.graph_vertices
    if not verts:
        return Arborescence._trusted({}), 0
    node_of = {v: i + 1 for i, v in enumerate(verts)}
    node_of[d.root] = 0

    # Edge records: (orig id, tail node, head node, adjusted cost, prev).
    # ``prev`` is the same edge one contraction earlier, used to expand.
    recs: list[tuple] = []
    for eid in sorted(d.edges):
        e = d.edges[eid]
        recs.append((eid, node_of[e.src], node_of[e.dst], costs[eid], None))
    next_node = len(verts) + 1
    rounds: list[tuple[int, list[int], dict[int, tuple]]] = []

    while True:
        best: dict[int, tuple] = {}
        for rec in recs:
            u, v, w = rec[1], rec[2], rec[3]
            if u == v or v == 0:
                continue
            cur = best.get(v)
            if cur is None or (w, rec[0]) < (cur[3], cur[0]):
                best[v] = rec
        cycle = _find_cycle({v: rec[1] for v, rec in best.items()})
        if cycle is None:
            break
        cyc = set(cycle)
        cnode = next_node
        next_node += 1
        new_recs = []
        for rec in recs:
            orig, u, v, w, _ = rec
            nu = cnode if u in cyc else u
            nv = cnode if v in cyc else v
            if nu == nv == cnode:
                continue
            nw = w - best[v][3] if v in cyc else w
            new_recs.append((orig, nu, nv, nw, rec))
        rounds.append((cnode, cycle, {v: best[v] for v in cycle}))
        recs = new_recs

    selected = list(best.values())
    for cnode, cycle, cyc_best in reversed(rounds):
        lowered = []
        entering_head = None
        for rec in selected:
            prev = rec[4]
            if rec[2] == cnode:
                entering_head = prev[2]
            lowered.append(prev)
        if entering_head is None:
            raise InternalError("contracted node lost its in-edge")
        for node in cycle:
            if node != entering_head:
                lowered.append(cyc_best[node])
        selected = lowered

    edge_of: dict[str, str] = {}
    total = 0
    for rec in selected:
        eid = rec[0]
        edge_of[d.edges[eid].dst] = eid
        total += costs[eid]
    if len(edge_of) != len(verts):
        raise InternalError("min-cost expansion did not cover every vertex")
    return Arborescence._trusted(edge_of), total


@dataclass(frozen=True)
class PopularityVerdict:
    """Result of the exact popularity test.

    ``popular`` holds iff ``min_cost`` equals the total vertex weight iff
    no more-popular arborescence (``witness``) exists.
    """

    popular: bool
    witness: Arborescence | None
    min_cost: int


def is_popular_exact(d: AugmentedDigraph, a: Arborescence) -> PopularityVerdict:
    """Decide popularity of ``a`` via the min-cost characterization.

    ``a`` itself always costs exactly the total vertex weight under its
    own cost function, so it is popular iff no arborescence is cheaper.
    A cheaper one is returned as the witness: it beats ``a`` by exactly
    the cost gap.
    """
    costs = {eid: edge_cost(d, a, eid) for eid in d.edges}
    candidate, cost = min_cost_arborescence(d, costs)
    total = d.total_weight
    if cost > total:
        raise InternalError(
            f"min-cost {cost} above the total weight {total}; the base "
            "arborescence itself is a cheaper solution")
    if cost == total:
        return PopularityVerdict(True, None, cost)
    return PopularityVerdict(False, candidate, cost)


def brute_popular_set(
    d: AugmentedDigraph, cap: int | None = 100_000
) -> list[Arborescence]:
    """All popular arborescences, by exhaustive pairwise margin evaluation.

    Quadratic in the number of arborescences; intended for small
    instances.  Raises CapExceeded when the enumeration exceeds ``cap``.
    """
    arbs = list(enumerate_arborescences(d, cap=cap))
    return [
        a for a in arbs
        if all(popularity_margin(d, b, a) <= 0 for b in arbs)
    ]


def find_popular_arborescence(
    d: AugmentedDigraph, cap: int | None = None
) -> Arborescence | None:
    """Some popular arborescence, or None after an exhaustive scan.

    Existence-only oracle that stays tractable where the pairwise brute
    set does not.  Two stages:

    * if the union of every vertex's most-preferred in-edges spans the
      graph from the root, any out-tree inside it is popular (no edge can
      cost less than the tree's own edges) and is returned without
      enumeating anything;
    * otherwise every arborescence is enumerated and shown beaten.  Each
      candidate is first tested against a cache of previously found
      beaters (a cheap rank-array margin evaluation); only cache misses
      pay for a min-cost search, which either proves the candidate
      popular or contributes a new beater.

    ``cap`` bounds the number of enumerated candidates as in
    :func:`enumerate_arborescences`.
    """
    from .augment import spanning_out_tree
    from .graph import reachable_from

    verts = d.graph_vertices
    n = len(verts)
    if n == 0:
        return Arborescence._trusted({})

    vidx = {v: i for i, v in enumerate(verts)}
    in_eids = [d.in_edges[v] for v in verts]
    in_tails = [
        [vidx.get(d.edges[e].src, -1) for e in lst] for lst in in_eids
    ]
    in_ranks = [[d.rank[e] for e in lst] for lst in in_eids]
    weights = [d.weight[v] for v in verts]

    best_edges = [
        eid
        for i in range(n)
        for eid, rk in zip(in_eids[i], in_ranks[i])
        if rk == min(in_ranks[i])
    ]
    if len(reachable_from(d, best_edges, d.root)) == n + 1:
        tree = spanning_out_tree(d, list(verts) + [d.root], best_edges,
                                 d.root)
        return Arborescence(d, tree)

    beaters: list[list[int]] = []
    hits: list[int] = []
    parent = [-2] * n
    ranks = [0] * n
    chosen = [""] * n
    count = 0
    found: list[Arborescence] = []

    def scan(i: int) -> None:
        nonlocal count
        if i == n:
            count += 1
            if cap is not None and count > cap:
                raise CapExceeded(
                    f"more than {cap} arborescences in the instance")
            for bi, trank in enumerate(beaters):
                margin = 0
                for j in range(n):
                    tj, aj = trank[j], ranks[j]
                    if tj < aj:
                        margin += weights[j]
                    elif tj > aj:
                        margin -= weights[j]
                if margin > 0:
                    hits[bi] += 1
                    if bi and hits[bi] > hits[bi - 1]:
                        beaters[bi - 1], beaters[bi] = \
                            beaters[bi], beaters[bi - 1]
                        hits[bi - 1], hits[bi] = hits[bi], hits[bi - 1]
                    return
            arb = Arborescence._trusted(
                {verts[j]: chosen[j] for j in range(n)})
            verdict = is_popular_exact(d, arb)
            if verdict.popular:
                found.append(arb)
                return
            beaters.append([
                d.rank[verdict.witness.edge_of[verts[j]]] for j in range(n)
            ])
            hits.append(0)
            return
        tails = in_tails[i]
        rks = in_ranks[i]
        eids = in_eids[i]
        for k in range(len(eids)):
            u = tails[k]
            x = u
            while x >= 0:
                if x == i:
                    break
                x = parent[x]
            else:
                parent[i] = u
                ranks[i] = rks[k]
                chosen[i] = eids[k]
                scan(i + 1)
                if found:
                    break
        parent[i] = -2

    scan(0)
    return found[0] if found else None
