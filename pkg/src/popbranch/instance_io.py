"""Instance and result files.

Instances are JSON objects with ``vertices`` ([{id, weight}]) and
``edges`` ([{id, src, dst, rank}]); root edges are never listed because
the augmentation determines them.  Results carry a status, the
arborescence (root edges serialized with edge_id "root"), the certificate
for popular outcomes, and a structured reason otherwise.  Serialization
is canonical (sorted keys, fixed indentation), so identical objects give
identical bytes.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .augment import Arborescence, AugmentedDigraph, edge_cost
from .certificate import DualSet, DualSolution
from .errors import SchemaError, UnknownEndpoint
from .graph import ROOT, Digraph, build_digraph
from .solver import (
    ASSUMPTION_VIOLATED,
    NONE_EXISTS,
    POPULAR_FOUND,
    BlockedComponent,
    ContractionUnreachable,
    EntryBlocker,
    MaximalFamily,
    SolveOutcome,
)

ROOT_EDGE_LABEL = "root"

_STATUSES = (POPULAR_FOUND, NONE_EXISTS, ASSUMPTION_VIOLATED)


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaError(path, message)


def _check_fields(obj: Mapping, path: str, required: dict[str, type],
                  optional: dict[str, type] | None = None) -> None:
    _expect(isinstance(obj, dict), path, "expected an object")
    allowed = dict(required)
    allowed.update(optional or {})
    for key in obj:
        _expect(key in allowed, f"{path}/{key}", "unknown field")
    for key, typ in required.items():
        _expect(key in obj, path, f"missing required field {key!r}")
    for key, typ in allowed.items():
        if key not in obj:
            continue
        val = obj[key]
        if typ is int:
            _expect(isinstance(val, int) and not isinstance(val, bool),
                    f"{path}/{key}", "expected an integer")
        else:
            _expect(isinstance(val, typ), f"{path}/{key}",
                    f"expected {typ.__name__}")


def instance_from_dict(data: Any) -> Digraph:
    """Validate a decoded instance object and build the graph."""
    _check_fields(data, "", {"vertices": list, "edges": list},
                  {"meta": dict})
    _expect(len(data["vertices"]) > 0, "/vertices", "must be non-empty")

    vertices: list[str] = []
    weights: dict[str, int] = {}
    seen: set[str] = set()
    for i, item in enumerate(data["vertices"]):
        path = f"/vertices/{i}"
        _check_fields(item, path, {"id": str, "weight": int})
        vid = item["id"]
        _expect(bool(vid), f"{path}/id", "must be non-empty")
        _expect(item["weight"] >= 1, f"{path}/weight",
                "must be a positive integer")
        if vid == ROOT:
            raise SchemaError(
                f"{path}/id", f"vertex id {ROOT!r} is reserved for the root")
        if vid in seen:
            raise SchemaError(f"{path}/id", f"duplicate vertex id {vid!r}")
        seen.add(vid)
        vertices.append(vid)
        weights[vid] = item["weight"]

    edges: list[tuple[str, str, str]] = []
    ranks: dict[str, int] = {}
    eseen: set[str] = set()
    for i, item in enumerate(data["edges"]):
        path = f"/edges/{i}"
        _check_fields(item, path,
                      {"id": str, "src": str, "dst": str, "rank": int})
        eid = item["id"]
        _expect(bool(eid), f"{path}/id", "must be non-empty")
        _expect(item["rank"] >= 1, f"{path}/rank",
                "must be a positive integer")
        if eid in eseen:
            raise SchemaError(f"{path}/id", f"duplicate edge id {eid!r}")
        eseen.add(eid)
        for key in ("src", "dst"):
            if item[key] not in seen:
                raise UnknownEndpoint(
                    f"{path}/{key}: unknown vertex {item[key]!r}"
                    + (" (the root never appears in instance files)"
                       if item[key] == ROOT else ""))
        edges.append((eid, item["src"], item["dst"]))
        ranks[eid] = item["rank"]

    return build_digraph(vertices, edges, weights, ranks)


def parse_instance(data: bytes | str) -> Digraph:
    """Parse instance JSON (UTF-8) into a validated graph."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SchemaError("", f"not valid UTF-8: {exc}") from exc
    try:
        decoded = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from exc
    return instance_from_dict(decoded)


def instance_to_dict(g: Digraph, meta: Mapping | None = None) -> dict:
    out: dict[str, Any] = {
        "vertices": [
            {"id": v, "weight": g.weight[v]} for v in g.vertices
        ],
        "edges": [
            {"id": e.id, "src": e.src, "dst": e.dst, "rank": g.rank[e.id]}
            for e in (g.edges[eid] for eid in sorted(g.edges))
        ],
    }
    if meta:
        out["meta"] = dict(meta)
    return out


def dump_canonical(obj: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def serialize_instance(g: Digraph, meta: Mapping | None = None) -> str:
    return dump_canonical(instance_to_dict(g, meta))


def _arborescence_to_list(arb: Arborescence, d: AugmentedDigraph) -> list:
    out = []
    for v in sorted(arb.edge_of):
        eid = arb.edge_of[v]
        e = d.edges[eid]
        out.append({
            "src": e.src,
            "dst": e.dst,
            "edge_id": ROOT_EDGE_LABEL if d.is_root_edge(eid) else eid,
        })
    return out


def _arborescence_from_list(items: list, d: AugmentedDigraph,
                            path: str) -> Arborescence:
    edge_of: dict[str, str] = {}
    for i, item in enumerate(items):
        p = f"{path}/{i}"
        _check_fields(item, p, {"src": str, "dst": str, "edge_id": str})
        dst = item["dst"]
        _expect(dst in d.weight, f"{p}/dst", f"unknown vertex {dst!r}")
        if item["src"] == ROOT and item["edge_id"] == ROOT_EDGE_LABEL:
            eid = d.root_edge[dst]
        else:
            eid = item["edge_id"]
            _expect(eid in d.edges, f"{p}/edge_id", f"unknown edge {eid!r}")
            e = d.edges[eid]
            _expect(e.src == item["src"] and e.dst == dst, p,
                    f"edge {eid!r} does not run {item['src']!r} -> {dst!r}")
        _expect(dst not in edge_of, f"{p}/dst",
                f"two in-edges given for {dst!r}")
        edge_of[dst] = eid
    try:
        return Arborescence(d, edge_of)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


def certificate_to_dict(dual: DualSolution) -> dict:
    return {
        "sets": [
            {"members": sorted(ds.members), "y": ds.value, "owner": ds.owner}
            for ds in dual.sets
        ],
    }


def certificate_from_dict(data: Any, path: str = "/certificate",
                          ) -> DualSolution:
    _check_fields(data, path, {"sets": list})
    sets = []
    for i, item in enumerate(data["sets"]):
        p = f"{path}/sets/{i}"
        _check_fields(item, p, {"members": list, "y": int, "owner": str})
        _expect(all(isinstance(m, str) for m in item["members"]),
                f"{p}/members", "expected a list of vertex ids")
        sets.append(DualSet(frozenset(item["members"]), item["y"],
                            item["owner"]))
    try:
        return DualSolution(sets)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


def _reason_to_dict(reason) -> dict:
    if isinstance(reason, BlockedComponent):
        return {
            "kind": "blocked_component",
            "members": sorted(reason.members),
            "entry_candidates": list(reason.entry_candidates),
            "blockers": [
                {"vertex": b.vertex, "lighter_vertex": b.lighter_vertex,
                 "bypass_edge": b.bypass_edge}
                for b in reason.blockers
            ],
        }
    if isinstance(reason, ContractionUnreachable):
        return {"kind": "contraction_unreachable"}
    raise TypeError(f"unserializable reason {reason!r}")


def _reason_from_dict(data: Any, path: str):
    _expect(isinstance(data, dict) and "kind" in data, path,
            "expected an object with a 'kind' field")
    kind = data["kind"]
    if kind == "blocked_component":
        _check_fields(data, path, {
            "kind": str, "members": list, "entry_candidates": list,
            "blockers": list})
        blockers = []
        for i, item in enumerate(data["blockers"]):
            p = f"{path}/blockers/{i}"
            _check_fields(item, p, {"vertex": str, "lighter_vertex": str,
                                    "bypass_edge": str})
            blockers.append(EntryBlocker(
                item["vertex"], item["lighter_vertex"], item["bypass_edge"]))
        return BlockedComponent(
            frozenset(data["members"]),
            tuple(data["entry_candidates"]),
            tuple(blockers),
        )
    if kind == "contraction_unreachable":
        return ContractionUnreachable()
    raise SchemaError(f"{path}/kind", f"unknown reason kind {kind!r}")


def result_to_dict(outcome: SolveOutcome, d: AugmentedDigraph) -> dict:
    out: dict[str, Any] = {"status": outcome.status}
    if outcome.status == POPULAR_FOUND:
        out["arborescence"] = _arborescence_to_list(outcome.arborescence, d)
        out["certificate"] = certificate_to_dict(outcome.certificate)
    elif outcome.status == NONE_EXISTS:
        out["reason"] = _reason_to_dict(outcome.reason)
    elif outcome.status == ASSUMPTION_VIOLATED:
        out["reason"] = {"triple": list(outcome.assumption_violation)}
    else:
        raise TypeError(f"unserializable status {outcome.status!r}")
    if outcome.assumption_violation is not None \
            and outcome.status != ASSUMPTION_VIOLATED:
        out["assumption_violation"] = list(outcome.assumption_violation)
    return out


def result_from_dict(data: Any, d: AugmentedDigraph) -> SolveOutcome:
    _check_fields(data, "", {"status": str},
                  {"arborescence": list, "certificate": dict,
                   "reason": dict, "assumption_violation": list})
    status = data["status"]
    _expect(status in _STATUSES, "/status", f"unknown status {status!r}")
    violation = None
    if "assumption_violation" in data:
        triple = data["assumption_violation"]
        _expect(len(triple) == 3 and all(isinstance(x, str) for x in triple),
                "/assumption_violation", "expected three vertex ids")
        violation = tuple(triple)
    if status == POPULAR_FOUND:
        _expect("arborescence" in data, "", "missing field 'arborescence'")
        _expect("certificate" in data, "", "missing field 'certificate'")
        return SolveOutcome(
            POPULAR_FOUND,
            arborescence=_arborescence_from_list(
                data["arborescence"], d, "/arborescence"),
            certificate=certificate_from_dict(data["certificate"]),
            assumption_violation=violation,
        )
    if status == NONE_EXISTS:
        _expect("reason" in data, "", "missing field 'reason'")
        return SolveOutcome(
            NONE_EXISTS,
            reason=_reason_from_dict(data["reason"], "/reason"),
            assumption_violation=violation,
        )
    _expect("reason" in data and "triple" in data["reason"], "/reason",
            "missing violating triple")
    triple = data["reason"]["triple"]
    _expect(len(triple) == 3 and all(isinstance(x, str) for x in triple),
            "/reason/triple", "expected three vertex ids")
    return SolveOutcome(ASSUMPTION_VIOLATED,
                        assumption_violation=tuple(triple))


def parse_result(data: bytes | str, d: AugmentedDigraph) -> SolveOutcome:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        decoded = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from exc
    return result_from_dict(decoded, d)


def serialize_result(outcome: SolveOutcome, d: AugmentedDigraph) -> str:
    return dump_canonical(result_to_dict(outcome, d))


def to_dot(d: AugmentedDigraph, outcome: SolveOutcome | None = None,
           family: MaximalFamily | None = None) -> str:
    """GraphViz rendering of the augmented digraph.

    Edges are labelled "rank/cost" (cost only when the outcome carries an
    arborescence, whose edges are drawn bold).  Family members become
    clusters.
    """
    arb = outcome.arborescence if outcome else None
    tree = arb.edge_ids if arb else frozenset()
    lines = ["digraph popbranch {", '  rankdir=LR;',
             f'  "{d.root}" [shape=doublecircle];']
    for v in d.graph_vertices:
        lines.append(f'  "{v}" [label="{v}\\nw={d.weight[v]}"];')
    if family is not None:
        for i, member in enumerate(family.members):
            lines.append(f"  subgraph cluster_{i} {{")
            lines.append('    style=dashed;')
            for v in sorted(member.members):
                lines.append(f'    "{v}";')
            lines.append("  }")
    for eid in sorted(d.edges):
        e = d.edges[eid]
        label = str(d.rank[eid])
        if arb is not None:
            label += f"/{edge_cost(d, arb, eid)}"
        style = ' style=bold color=black' if eid in tree else ' color=gray50'
        lines.append(
            f'  "{e.src}" -> "{e.dst}" [label="{label}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
