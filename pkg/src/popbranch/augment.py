"""Rooted augmentation of an instance graph and the cost machinery on it.

The augmented digraph adds an artificial root ``r`` and one edge (r, v)
per instance vertex.  Each root edge gets a sentinel rank one worse than
the worst finite rank at its head, so it is strictly least preferred and
ordinary integer comparison keeps working for it.
"""

from __future__ import annotations

from typing import Mapping

from .errors import DuplicateId, InternalError
from .graph import ROOT, Digraph, Edge

ROOT_EDGE_PREFIX = "__root__:"


class AugmentedDigraph:
    """An instance graph plus the root and its least-preferred edges.

    Exposes the same query surface as :class:`~popbranch.graph.Digraph`
    (``edges``, ``rank``, ``in_edges``, ``out_edges``, ``vertex_set``) so
    the traversal helpers work on both.  ``graph_vertices`` excludes the
    root; ``weight`` is defined for graph vertices only.
    """

    __slots__ = ("instance", "root", "graph_vertices", "vertex_set", "edges",
                 "weight", "rank", "in_edges", "out_edges", "root_edge",
                 "root_edge_ids", "total_weight", "in_profile")

    def __init__(self, instance, root, edges, rank, in_edges, out_edges,
                 root_edge):
        self.instance: Digraph = instance
        self.root: str = root
        self.graph_vertices: tuple[str, ...] = instance.vertices
        self.vertex_set: frozenset[str] = instance.vertex_set | {root}
        self.edges: dict[str, Edge] = edges
        self.weight: dict[str, int] = instance.weight
        self.rank: dict[str, int] = rank
        self.in_edges: dict[str, tuple[str, ...]] = in_edges
        self.out_edges: dict[str, tuple[str, ...]] = out_edges
        self.root_edge: dict[str, str] = root_edge
        self.root_edge_ids: frozenset[str] = frozenset(root_edge.values())
        self.total_weight: int = sum(instance.weight.values())
        # Per-head (rank, edge id, tail) triples in edge-id order; the hot
        # loops of the safe-edge computation run on this flat layout.
        self.in_profile: dict[str, tuple[tuple[int, str, str], ...]] = {
            v: tuple((rank[eid], eid, edges[eid].src) for eid in in_edges[v])
            for v in instance.vertices
        }

    def is_root_edge(self, eid: str) -> bool:
        return eid in self.root_edge_ids

    def __repr__(self):
        return (f"AugmentedDigraph({len(self.graph_vertices)} vertices, "
                f"{len(self.edges)} edges)")


def augment(g: Digraph) -> AugmentedDigraph:
    """Attach the root and one sentinel-ranked root edge per vertex."""
    edges = dict(g.edges)
    rank = dict(g.rank)
    root_edge: dict[str, str] = {}
    in_edges: dict[str, tuple[str, ...]] = {}
    root_out: list[str] = []
    for v in g.vertices:
        eid = ROOT_EDGE_PREFIX + v
        if eid in g.edges:
            raise DuplicateId(f"edge id {eid!r} collides with a root edge")
        worst = max((g.rank[x] for x in g.in_edges[v]), default=0)
        edges[eid] = Edge(eid, ROOT, v)
        rank[eid] = worst + 1
        root_edge[v] = eid
        in_edges[v] = tuple(sorted(g.in_edges[v] + (eid,)))
        root_out.append(eid)
    in_edges[ROOT] = ()
    out_edges = {v: g.out_edges[v] for v in g.vertices}
    out_edges[ROOT] = tuple(sorted(root_out))
    return AugmentedDigraph(g, ROOT, edges, rank, in_edges, out_edges,
                            root_edge)


class Arborescence:
    """A spanning out-tree of an augmented digraph rooted at ``r``.

    Stored as the map from each graph vertex to its unique in-edge, which
    is the access pattern every cost formula uses.  Construction validates
    acyclicity and spanning in O(n + m); equality and hashing go by the
    edge set.
    """

    __slots__ = ("edge_of", "_edge_ids")

    def __init__(self, d: AugmentedDigraph, edge_of: Mapping[str, str]):
        want = set(d.graph_vertices)
        got = set(edge_of)
        if got != want:
            missing = sorted(want - got)
            extra = sorted(got - want)
            raise ValueError(
                f"not an arborescence: wrong vertex cover "
                f"(missing {missing[:3]}, extra {extra[:3]})")
        children: dict[str, list[str]] = {}
        for v, eid in edge_of.items():
            e = d.edges[eid]
            if e.dst != v:
                raise ValueError(
                    f"not an arborescence: edge {eid!r} does not enter {v!r}")
            children.setdefault(e.src, []).append(v)
        seen = {d.root}
        stack = [d.root]
        while stack:
            u = stack.pop()
            for v in children.get(u, ()):
                seen.add(v)
                stack.append(v)
        if len(seen) != len(want) + 1:
            raise ValueError(
                "not an arborescence: not every vertex is reachable from "
                "the root (the chosen edges contain a cycle)")
        self.edge_of: dict[str, str] = dict(edge_of)
        self._edge_ids = frozenset(edge_of.values())

    @classmethod
    def _trusted(cls, edge_of: dict[str, str]) -> "Arborescence":
        # Fast path for callers that construct valid trees by design
        # (enumeration, min-cost search); skips the O(n) validation.
        obj = object.__new__(cls)
        obj.edge_of = edge_of
        obj._edge_ids = frozenset(edge_of.values())
        return obj

    @property
    def edge_ids(self) -> frozenset[str]:
        return self._edge_ids

    def __eq__(self, other):
        if not isinstance(other, Arborescence):
            return NotImplemented
        return self.edge_of == other.edge_of

    def __hash__(self):
        return hash(self._edge_ids)

    def __repr__(self):
        return f"Arborescence({sorted(self._edge_ids)})"


def edge_cost(d: AugmentedDigraph, base: Arborescence, eid: str) -> int:
    """Cost of ``eid`` relative to the in-edge ``base`` gives its head.

    0 if the head strictly prefers ``eid``, w(head) on indifference,
    2*w(head) if the head strictly prefers its ``base`` edge.
    """
    v = d.edges[eid].dst
    re = d.rank[eid]
    rb = d.rank[base.edge_of[v]]
    if re < rb:
        return 0
    if re == rb:
        return d.weight[v]
    return 2 * d.weight[v]


def total_cost(d: AugmentedDigraph, base: Arborescence,
               other: Arborescence) -> int:
    """Sum of the ``base``-relative edge costs over ``other``'s edges."""
    return sum(edge_cost(d, base, eid) for eid in other.edge_of.values())


def popularity_margin(d: AugmentedDigraph, a: Arborescence,
                      b: Arborescence) -> int:
    """Weighted vote margin of ``a`` over ``b``.

    Each vertex votes its weight for the arborescence whose in-edge it
    strictly prefers; positive means ``a`` is more popular than ``b``.
    """
    margin = 0
    for v in d.graph_vertices:
        ra = d.rank[a.edge_of[v]]
        rb = d.rank[b.edge_of[v]]
        if ra < rb:
            margin += d.weight[v]
        elif rb < ra:
            margin -= d.weight[v]
    return margin


def check_weight_assumption(
    weights: Mapping[str, int], *, distinct: bool = True
) -> tuple[bool, tuple[str, str, str] | None]:
    """Check that any two vertex weights together exceed any single one.

    With ``distinct=True`` (the gating reading) the two vertices on the
    left-hand side must differ, so the condition reduces to: the two
    smallest weights over distinct vertices sum to more than the maximum
    weight.  With ``distinct=False`` the same vertex may be used twice,
    which additionally requires 2*min > max.  Returns (ok, None) or
    (False, (s, t, u)) with a concrete violating triple.
    """
    items = sorted(weights.items(), key=lambda kv: (kv[1], kv[0]))
    if not items:
        return True, None
    u, wu = max(items, key=lambda kv: (kv[1], kv[0]))
    if distinct:
        if len(items) < 2:
            return True, None
        (s, ws), (t, wt) = items[0], items[1]
        if ws + wt > wu:
            return True, None
        return False, (s, t, u)
    s, ws = items[0]
    if 2 * ws > wu:
        return True, None
    return False, (s, s, u)


def spanning_out_tree(d: AugmentedDigraph, vertices, edge_ids, root: str,
                      ) -> dict[str, str]:
    """Deterministic BFS out-tree of (vertices, edge_ids) rooted at ``root``.

    Vertices are taken in BFS discovery order and candidate edges in
    sorted-id order, so the result is reproducible.  Maps every vertex
    except ``root`` to its chosen in-edge; raises InternalError if the
    edge set does not span all of ``vertices`` from ``root``.
    """
    vset = set(vertices)
    adj: dict[str, list[str]] = {v: [] for v in vset}
    for eid in sorted(edge_ids):
        e = d.edges[eid]
        adj[e.src].append(eid)
    parent: dict[str, str] = {}
    order = [root]
    seen = {root}
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        for eid in adj[u]:
            w = d.edges[eid].dst
            if w not in seen:
                seen.add(w)
                parent[w] = eid
                order.append(w)
    if len(seen) != len(vset):
        raise InternalError(
            f"edge set does not span {len(vset)} vertices from {root!r}")
    return parent
