"""Safe edges of a vertex subset.

An edge (u, v) inside X is safe when no other edge inside X strictly
beats it at v and it strictly beats every edge entering v from outside X
(root edges included).  Because preferences are total preorders this is
a per-head rank comparison: take the best interior rank at v and keep its
edges iff that rank strictly beats the best boundary rank at v.
"""

from __future__ import annotations

from typing import Iterable

from .augment import AugmentedDigraph
from .graph import ROOT


def safe_edges(d: AugmentedDigraph, members: Iterable[str]) -> frozenset[str]:
    """Edge ids of the safe edges of ``members``.

    ``members`` must be a non-empty subset of the graph vertices (never
    the root).  Runs in O(sum of in-degrees over the subset).
    """
    x = members if isinstance(members, (set, frozenset)) else set(members)
    if not x:
        raise ValueError("safe_edges: the vertex subset must be non-empty")
    if ROOT in x:
        raise ValueError("safe_edges: the root cannot be in the subset")
    result: list[str] = []
    for v in x:
        best_in: int | None = None
        best_out: int | None = None
        keep: list[str] = []
        for rk, eid, src in d.in_profile[v]:
            if src in x:
                if best_in is None or rk < best_in:
                    best_in = rk
                    keep = [eid]
                elif rk == best_in:
                    keep.append(eid)
            elif best_out is None or rk < best_out:
                best_out = rk
        # The root edge is always a boundary edge, so best_out exists.
        if best_in is not None and best_in < best_out:
            result.extend(keep)
    return frozenset(result)


def safe_out_adjacency(d: AugmentedDigraph,
                       members: frozenset[str]) -> dict[str, list[str]]:
    """Tail-to-heads adjacency of the safe edges of ``members``.

    Same selection as :func:`safe_edges` without materializing edge ids;
    this is the solver's inner loop.
    """
    adj: dict[str, list[str]] = {}
    for v in members:
        best_in: int | None = None
        best_out: int | None = None
        tails: list[str] = []
        for rk, _, src in d.in_profile[v]:
            if src in members:
                if best_in is None or rk < best_in:
                    best_in = rk
                    tails = [src]
                elif rk == best_in:
                    tails.append(src)
            elif best_out is None or rk < best_out:
                best_out = rk
        if best_in is not None and best_in < best_out:
            for src in tails:
                adj.setdefault(src, []).append(v)
    return adj
