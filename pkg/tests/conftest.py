"""Shared fixtures and independent brute-force oracles for the tests.

The helpers here deliberately reimplement graph primitives in the most
naive way possible (adjacency-matrix closures, per-edge condition scans,
cartesian-product enumeration) so the package's optimized implementations
are checked against genuinely independent code paths.
"""

from __future__ import annotations

import itertools
import random

import pytest

from popbranch import augment, build_digraph
from popbranch.generate import GenParams, generate_random
from popbranch.instance_io import dump_canonical, parse_instance


def mk(vertices, edges, weights=None, ranks=None):
    """Compact instance builder.

    ``edges`` is a list of (id, src, dst, rank); weights default to 1.
    """
    weights = weights or {v: 1 for v in vertices}
    ranks = {eid: rk for eid, _, _, rk in edges}
    return build_digraph(vertices, [(e, s, t) for e, s, t, _ in edges],
                         weights, ranks)


@pytest.fixture
def pair():
    """Two vertices, one edge a->b, unit weights."""
    return mk(["a", "b"], [("ab", "a", "b", 1)])


def make_cycle3(weights):
    return mk(
        ["a", "b", "c"],
        [("ab", "a", "b", 1), ("bc", "b", "c", 1), ("ca", "c", "a", 1)],
        weights,
    )


@pytest.fixture
def cycle3_weighted():
    """Directed 3-cycle with weights (3, 2, 2)."""
    return make_cycle3({"a": 3, "b": 2, "c": 2})


@pytest.fixture
def cycle3_uniform():
    return make_cycle3({"a": 1, "b": 1, "c": 1})


@pytest.fixture
def cycle3_bad_weights():
    """Weights (3, 1, 1) violate the weight condition."""
    return make_cycle3({"a": 3, "b": 1, "c": 1})


def make_blocked():
    """Every minimum-weight entry candidate of the single big member is
    blocked by the lighter vertex s, so no popular arborescence exists."""
    return mk(
        ["s", "t", "u"],
        [("ts", "t", "s", 1), ("ut", "u", "t", 1), ("tu", "t", "u", 1),
         ("st", "s", "t", 2), ("su", "s", "u", 2)],
        {"s": 1, "t": 2, "u": 2},
    )


def make_mixed_blocked():
    """Entry candidate t is blocked but u is not; the only popular
    arborescence enters at u."""
    return mk(
        ["s", "t", "u"],
        [("ts", "t", "s", 1), ("ut", "u", "t", 1), ("tu", "t", "u", 1),
         ("st", "s", "t", 2)],
        {"s": 1, "t": 2, "u": 2},
    )


@pytest.fixture
def blocked():
    return make_blocked()


@pytest.fixture
def mixed_blocked():
    return make_mixed_blocked()


def random_instance(seed, max_n=6, densities=(0.2, 0.4, 0.7),
                    max_weights=(1, 3, 5), tie_probs=(0.0, 0.3),
                    enforce=True):
    """One seeded random instance, round-tripped through the file format."""
    rng = random.Random(seed)
    params = GenParams(
        n=rng.randint(1, max_n),
        density=rng.choice(list(densities)),
        max_weight=rng.choice(list(max_weights)),
        tie_prob=rng.choice(list(tie_probs)),
        enforce_assumption=enforce,
        seed=seed,
    )
    return parse_instance(dump_canonical(generate_random(params)))


# -- independent oracles -------------------------------------------------

def brute_reachable(g, edge_ids, source):
    """Reachability by repeated relaxation over an explicit pair list."""
    pairs = {(g.edges[e].src, g.edges[e].dst) for e in edge_ids}
    seen = {source}
    changed = True
    while changed:
        changed = False
        for u, v in pairs:
            if u in seen and v not in seen:
                seen.add(v)
                changed = True
    return frozenset(seen)


def brute_mutually_reachable(g, vertex_set, edge_ids):
    """Partition by pairwise mutual reachability within the subset."""
    vs = sorted(vertex_set)
    inside = {
        e for e in edge_ids
        if g.edges[e].src in vertex_set and g.edges[e].dst in vertex_set
    }
    reach = {v: brute_reachable(g, inside, v) for v in vs}
    comps = []
    assigned = set()
    for v in vs:
        if v in assigned:
            continue
        comp = {u for u in vs if u in reach[v] and v in reach[u]}
        comps.append(frozenset(comp))
        assigned |= comp
    return comps


def brute_safe_edges(d, members):
    """Literal two-condition scan of the safe-edge definition."""
    x = set(members)
    result = set()
    for eid, e in d.edges.items():
        if e.src not in x or e.dst not in x:
            continue
        undominated = all(
            not (d.rank[other] < d.rank[eid])
            for other in d.in_edges[e.dst]
            if d.edges[other].src in x
        )
        beats_boundary = all(
            d.rank[eid] < d.rank[other]
            for other in d.in_edges[e.dst]
            if d.edges[other].src not in x
        )
        if undominated and beats_boundary:
            result.add(eid)
    return frozenset(result)


def brute_arborescences(d):
    """All root arborescences via cartesian product plus a validity filter."""
    verts = d.graph_vertices
    out = []
    for combo in itertools.product(*(d.in_edges[v] for v in verts)):
        edge_of = dict(zip(verts, combo))
        seen = {d.root}
        frontier = [d.root]
        while frontier:
            u = frontier.pop()
            for v, eid in edge_of.items():
                if d.edges[eid].src == u and v not in seen:
                    seen.add(v)
                    frontier.append(v)
        if len(seen) == len(verts) + 1:
            out.append(frozenset(combo))
    return out
