"""Directed graph model: weighted vertices and ranked in-edge preferences.

Each vertex orders its incoming edges by a positive integer rank (smaller
rank = more preferred, equal rank = indifferent), so the per-vertex
preference relation is a total preorder by construction.  Graphs are
immutable once built, and every adjacency structure iterates in sorted-id
order so that all downstream tie-breaking is reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    DuplicateId,
    HeadMismatch,
    MissingRank,
    MissingWeight,
    NonpositiveWeight,
    SelfLoop,
    UnknownEndpoint,
)

#: Reserved identifier of the artificial root vertex.
ROOT = "r"


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str


class Comparison(enum.Enum):
    """Outcome of comparing two edges that enter the same vertex."""

    FIRST_PREFERRED = "first_preferred"
    INDIFFERENT = "indifferent"
    SECOND_PREFERRED = "second_preferred"


class Digraph:
    """Validated digraph with vertex weights and per-head edge ranks.

    Build instances through :func:`build_digraph`; the constructor trusts
    its arguments.  The object must not be mutated after construction and
    is then safe to share across threads.
    """

    __slots__ = ("vertices", "vertex_set", "edges", "weight", "rank",
                 "in_edges", "out_edges")

    def __init__(self, vertices, edges, weight, rank, in_edges, out_edges):
        self.vertices: tuple[str, ...] = vertices
        self.vertex_set: frozenset[str] = frozenset(vertices)
        self.edges: dict[str, Edge] = edges
        self.weight: dict[str, int] = weight
        self.rank: dict[str, int] = rank
        self.in_edges: dict[str, tuple[str, ...]] = in_edges
        self.out_edges: dict[str, tuple[str, ...]] = out_edges

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return (self.vertices == other.vertices
                and self.edges == other.edges
                and self.weight == other.weight
                and self.rank == other.rank)

    def __hash__(self):
        return hash((self.vertices, frozenset(self.edges)))

    def __repr__(self):
        return (f"Digraph({len(self.vertices)} vertices, "
                f"{len(self.edges)} edges)")


def build_digraph(
    vertices: Iterable[str],
    edges: Iterable[tuple[str, str, str]],
    weights: Mapping[str, int],
    ranks: Mapping[str, int],
) -> Digraph:
    """Validate and index an instance graph.

    ``edges`` are (id, src, dst) triples; ``ranks`` maps edge ids to the
    per-head preference rank.  Raises a subclass of
    :class:`~popbranch.errors.InstanceError` on the first violation found,
    in deterministic (sorted) order.
    """
    vlist: list[str] = []
    vseen: set[str] = set()
    for v in vertices:
        if v in vseen:
            raise DuplicateId(f"duplicate vertex id {v!r}")
        if v == ROOT:
            raise DuplicateId(f"vertex id {ROOT!r} is reserved for the root")
        vseen.add(v)
        vlist.append(v)
    vlist.sort()

    eseen: dict[str, Edge] = {}
    for eid, src, dst in edges:
        if eid in eseen:
            raise DuplicateId(f"duplicate edge id {eid!r}")
        if src == dst:
            raise SelfLoop(f"edge {eid!r} is a self-loop at {src!r}")
        if src not in vseen:
            raise UnknownEndpoint(f"edge {eid!r}: unknown source vertex {src!r}")
        if dst not in vseen:
            raise UnknownEndpoint(f"edge {eid!r}: unknown target vertex {dst!r}")
        eseen[eid] = Edge(eid, src, dst)

    weight: dict[str, int] = {}
    for v in vlist:
        if v not in weights:
            raise MissingWeight(f"no weight for vertex {v!r}")
        w = weights[v]
        if isinstance(w, bool) or not isinstance(w, int) or w < 1:
            raise NonpositiveWeight(
                f"vertex {v!r}: weight must be a positive integer, got {w!r}")
        weight[v] = w
    for v in weights:
        if v not in vseen:
            raise UnknownEndpoint(f"weight given for unknown vertex {v!r}")

    rank: dict[str, int] = {}
    for eid in sorted(eseen):
        if eid not in ranks:
            raise MissingRank(f"no rank for edge {eid!r}")
        rk = ranks[eid]
        if isinstance(rk, bool) or not isinstance(rk, int) or rk < 1:
            raise MissingRank(
                f"edge {eid!r}: rank must be a positive integer, got {rk!r}")
        rank[eid] = rk
    for eid in ranks:
        if eid not in eseen:
            raise UnknownEndpoint(f"rank given for unknown edge {eid!r}")

    in_lists: dict[str, list[str]] = {v: [] for v in vlist}
    out_lists: dict[str, list[str]] = {v: [] for v in vlist}
    for eid in sorted(eseen):
        e = eseen[eid]
        in_lists[e.dst].append(eid)
        out_lists[e.src].append(eid)

    return Digraph(
        vertices=tuple(vlist),
        edges={eid: eseen[eid] for eid in sorted(eseen)},
        weight=weight,
        rank=rank,
        in_edges={v: tuple(lst) for v, lst in in_lists.items()},
        out_edges={v: tuple(lst) for v, lst in out_lists.items()},
    )


def compare(g, e_id: str, f_id: str) -> Comparison:
    """Compare two edges entering the same vertex.

    Returns FIRST_PREFERRED iff the head vertex strictly prefers ``e_id``
    to ``f_id`` (smaller rank), INDIFFERENT on equal ranks.  Works on both
    plain and augmented digraphs.
    """
    e = g.edges[e_id]
    f = g.edges[f_id]
    if e.dst != f.dst:
        raise HeadMismatch(
            f"cannot compare edges {e_id!r} (into {e.dst!r}) and "
            f"{f_id!r} (into {f.dst!r})")
    re, rf = g.rank[e_id], g.rank[f_id]
    if re < rf:
        return Comparison.FIRST_PREFERRED
    if re > rf:
        return Comparison.SECOND_PREFERRED
    return Comparison.INDIFFERENT


def dominates(g, e_id: str, f_id: str) -> bool:
    """True iff the shared head strictly prefers ``e_id`` to ``f_id``."""
    return compare(g, e_id, f_id) is Comparison.FIRST_PREFERRED


def reachable_from(g, edge_ids: Iterable[str], source: str) -> frozenset[str]:
    """Vertices reachable from ``source`` using only ``edge_ids``.

    Always contains ``source`` itself.
    """
    if source not in g.vertex_set:
        raise UnknownEndpoint(f"unknown vertex {source!r}")
    adj: dict[str, list[str]] = {}
    for eid in edge_ids:
        e = g.edges[eid]
        adj.setdefault(e.src, []).append(e.dst)
    seen = {source}
    stack = [source]
    while stack:
        v = stack.pop()
        for w in adj.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)


def scc_partition(
    g, vertex_set: Iterable[str], edge_ids: Iterable[str]
) -> tuple[tuple[frozenset[str], ...], tuple[int, ...]]:
    """Strongly connected components of the subgraph (vertex_set, edge_ids).

    Edges with an endpoint outside ``vertex_set`` are ignored.  Returns the
    components in completion order of an iterative Tarjan scan (successors
    always precede their ancestors, i.e. reverse topological order of the
    condensation) together with, for each component, the number of subset
    edges entering it from another component.
    """
    verts = sorted(vertex_set)
    vset = set(verts)
    adj: dict[str, list[str]] = {v: [] for v in verts}
    pairs: list[tuple[str, str]] = []
    for eid in sorted(edge_ids):
        e = g.edges[eid]
        if e.src in vset and e.dst in vset:
            adj[e.src].append(e.dst)
            pairs.append((e.src, e.dst))

    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    comps: list[frozenset[str]] = []
    counter = 0

    for root in verts:
        if root in index:
            continue
        work: list[tuple[str, int]] = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            descended = False
            neighbours = adj[v]
            while i < len(neighbours):
                w = neighbours[i]
                i += 1
                if w not in index:
                    work.append((v, i))
                    work.append((w, 0))
                    descended = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if descended:
                continue
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                comps.append(frozenset(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])

    comp_of = {v: ci for ci, comp in enumerate(comps) for v in comp}
    indeg = [0] * len(comps)
    for src, dst in pairs:
        if comp_of[src] != comp_of[dst]:
            indeg[comp_of[dst]] += 1
    return tuple(comps), tuple(indeg)
