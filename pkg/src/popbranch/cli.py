"""Command-line interface.

Exit codes: 0 success / popular found, 1 input error, 2 no popular
arborescence exists, 3 weight condition violated, 4 verification failed,
5 enumeration cap exceeded.  Machine-readable JSON goes to stdout when
requested; human diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

from .augment import augment, check_weight_assumption
from .certificate import verify_feasible, verify_popularity
from .errors import CapExceeded, InstanceError, PopbranchError
from .generate import GenParams, generate_random
from .instance_io import (
    certificate_to_dict,
    dump_canonical,
    parse_instance,
    parse_result,
    serialize_result,
    to_dot,
)
from .oracle import brute_popular_set, is_popular_exact
from .solver import (
    ASSUMPTION_VIOLATED,
    NONE_EXISTS,
    POPULAR_FOUND,
    solve_with_trace,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NONE_EXISTS = 2
EXIT_ASSUMPTION = 3
EXIT_VERIFY_FAILED = 4
EXIT_CAP_EXCEEDED = 5

_STATUS_EXIT = {
    POPULAR_FOUND: EXIT_OK,
    NONE_EXISTS: EXIT_NONE_EXISTS,
    ASSUMPTION_VIOLATED: EXIT_ASSUMPTION,
}


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _describe_tree(outcome, d) -> str:
    parts = []
    for v in sorted(outcome.arborescence.edge_of):
        e = d.edges[outcome.arborescence.edge_of[v]]
        parts.append(f"({e.src},{e.dst})")
    return " ".join(parts)


def cmd_solve(args) -> int:
    g = parse_instance(_read(args.instance))
    trace = solve_with_trace(g, force=args.force)
    outcome, d = trace.outcome, trace.augmented

    result_json = serialize_result(outcome, d)
    if args.output:
        Path(args.output).write_text(result_json, encoding="utf-8")
    if args.dot:
        Path(args.dot).write_text(to_dot(d, outcome, trace.family),
                                  encoding="utf-8")

    if outcome.assumption_violation is not None:
        s, t, u = outcome.assumption_violation
        _note(f"weight condition violated: w({s}) + w({t}) <= w({u})"
              + (" (solved anyway)" if args.force else ""))

    if args.json:
        sys.stdout.write(result_json)
    elif outcome.status == POPULAR_FOUND:
        print(f"popular arborescence: {_describe_tree(outcome, d)}")
        if args.certificate:
            print("certificate:")
            for ds in outcome.certificate.sets:
                print(f"  y{sorted(ds.members)} = {ds.value}"
                      f" (owner {ds.owner})")
            for name, rep in (("feasibility", verify_feasible),
                              ("popularity", verify_popularity)):
                report = rep(d, outcome.arborescence, outcome.certificate)
                state = "ok" if report.ok else "FAILED"
                print(f"  {name}: {state}")
    elif outcome.status == NONE_EXISTS:
        print(f"no popular arborescence exists "
              f"({outcome.reason.__class__.__name__})")
    else:
        s, t, u = outcome.assumption_violation
        print(f"weight condition violated by ({s}, {t}, {u}); "
              f"rerun with --force to solve anyway")
    return _STATUS_EXIT[outcome.status]


def _verify_one(instance_path: str, result_path: str,
                cap: int) -> tuple[int, str]:
    g = parse_instance(_read(instance_path))
    d = augment(g)
    outcome = parse_result(_read(result_path), d)
    if outcome.status == POPULAR_FOUND:
        verdict = is_popular_exact(d, outcome.arborescence)
        if not verdict.popular:
            return EXIT_VERIFY_FAILED, (
                f"arborescence is not popular (min cost {verdict.min_cost} "
                f"below total weight {d.total_weight})")
        reports = [verify_feasible(d, outcome.arborescence,
                                   outcome.certificate),
                   verify_popularity(d, outcome.arborescence,
                                     outcome.certificate)]
        failures = [c.name for r in reports for c in r.failures()]
        if failures:
            return EXIT_VERIFY_FAILED, (
                "certificate checks failed: " + ", ".join(failures))
        return EXIT_OK, "popular; certificate verified"
    if outcome.status == NONE_EXISTS:
        popular = brute_popular_set(d, cap=cap)
        if popular:
            return EXIT_VERIFY_FAILED, (
                f"claimed nonexistence, but {len(popular)} popular "
                f"arborescences exist")
        return EXIT_OK, "nonexistence confirmed by exhaustive search"
    ok, triple = check_weight_assumption(g.weight)
    if ok:
        return EXIT_VERIFY_FAILED, "claimed violation, but weights are fine"
    return EXIT_OK, f"weight condition indeed violated by {triple}"


def _result_path_for(instance: Path) -> Path:
    return instance.with_suffix(".result.json")


def _batch_targets(directory: Path) -> list[Path]:
    return sorted(p for p in directory.glob("*.json")
                  if not p.name.endswith(".result.json"))


def cmd_verify(args) -> int:
    instance = Path(args.instance)
    if instance.is_dir():
        pairs = []
        for inst in _batch_targets(instance):
            result = _result_path_for(inst)
            if result.exists():
                pairs.append((inst, result))
        if not pairs:
            _note(f"no instance/result pairs under {instance}")
            return EXIT_INPUT_ERROR
        worst = EXIT_OK
        if args.jobs > 1:
            with concurrent.futures.ProcessPoolExecutor(args.jobs) as pool:
                futures = {
                    pool.submit(_verify_one, str(i), str(r), args.cap): i
                    for i, r in pairs
                }
                for fut in concurrent.futures.as_completed(futures):
                    code, msg = fut.result()
                    print(f"{futures[fut]}: {msg}")
                    worst = max(worst, code)
        else:
            for inst, result in pairs:
                code, msg = _verify_one(str(inst), str(result), args.cap)
                print(f"{inst}: {msg}")
                worst = max(worst, code)
        return worst
    if not args.result:
        _note("verify: a result file is required "
              "(or pass a directory of instances)")
        return EXIT_INPUT_ERROR
    code, msg = _verify_one(args.instance, args.result, args.cap)
    print(msg)
    return code


def _enumerate_one(path: str, cap: int) -> dict:
    g = parse_instance(_read(path))
    d = augment(g)
    popular = brute_popular_set(d, cap=cap)
    return {
        "popular_count": len(popular),
        "popular": [
            [
                {"src": d.edges[a.edge_of[v]].src, "dst": v,
                 "edge_id": ("root" if d.is_root_edge(a.edge_of[v])
                             else a.edge_of[v])}
                for v in sorted(a.edge_of)
            ]
            for a in popular
        ],
    }


def cmd_enumerate(args) -> int:
    target = Path(args.instance)
    if target.is_dir():
        paths = _batch_targets(target)
        worst = EXIT_OK
        results: list[tuple[Path, dict | str]] = []
        if args.jobs > 1:
            with concurrent.futures.ProcessPoolExecutor(args.jobs) as pool:
                futures = {pool.submit(_try_enumerate, str(p), args.cap): p
                           for p in paths}
                done = {futures[f]: f.result()
                        for f in concurrent.futures.as_completed(futures)}
            results = [(p, done[p]) for p in paths]
        else:
            results = [(p, _try_enumerate(str(p), args.cap)) for p in paths]
        for p, res in results:
            if isinstance(res, str):
                print(f"{p}: {res}")
                worst = max(worst, EXIT_CAP_EXCEEDED)
            else:
                print(f"{p}: {res['popular_count']} popular")
        return worst
    sys.stdout.write(dump_canonical(_enumerate_one(args.instance, args.cap)))
    return EXIT_OK


def _try_enumerate(path: str, cap: int) -> dict | str:
    try:
        return _enumerate_one(path, cap)
    except CapExceeded as exc:
        return str(exc)


def cmd_gen(args) -> int:
    params = GenParams(
        n=args.n,
        density=args.density,
        max_weight=args.max_weight,
        tie_prob=args.tie_prob,
        enforce_assumption=args.enforce_assumption,
        seed=args.seed,
    )
    text = dump_canonical(generate_random(params))
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_check(args) -> int:
    g = parse_instance(_read(args.instance))
    ok, triple = check_weight_assumption(g.weight)
    print(f"instance ok: {len(g.vertices)} vertices, {len(g.edges)} edges")
    if args.verbose:
        strict_ok, strict_triple = check_weight_assumption(
            g.weight, distinct=False)
        print(f"weight condition (distinct vertices): "
              f"{'ok' if ok else f'violated by {triple}'}")
        print(f"weight condition (identical vertices allowed): "
              f"{'ok' if strict_ok else f'violated by {strict_triple}'}")
    if not ok:
        s, t, u = triple
        print(f"weight condition violated: w({s}) + w({t}) <= w({u})")
        return EXIT_ASSUMPTION
    if not args.verbose:
        print("weight condition: ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="popbranch",
        description="Find popular arborescences in vertex-weighted digraphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("instance")
    p.add_argument("--certificate", action="store_true",
                   help="print the certificate and its verification")
    p.add_argument("--force", action="store_true",
                   help="solve even when the weight condition fails")
    p.add_argument("--json", action="store_true",
                   help="write the result JSON to stdout")
    p.add_argument("-o", "--output", metavar="FILE",
                   help="write the result JSON to FILE")
    p.add_argument("--dot", metavar="FILE",
                   help="write a GraphViz rendering to FILE")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify",
                       help="re-check a result against the oracles")
    p.add_argument("instance", help="instance file, or a directory of "
                   "instances with <name>.result.json siblings")
    p.add_argument("result", nargs="?")
    p.add_argument("--cap", type=int, default=100_000,
                   help="enumeration cap for nonexistence re-checks")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers in directory mode")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate",
                       help="list all popular arborescences by brute force")
    p.add_argument("instance", help="instance file or directory")
    p.add_argument("--cap", type=int, default=100_000)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--max-weight", type=int, required=True)
    p.add_argument("--tie-prob", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--enforce-assumption", action="store_true")
    p.add_argument("-o", "--output", required=True,
                   help="output file, or - for stdout")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check",
                       help="validate an instance and its weight condition")
    p.add_argument("instance")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        _note(f"error: {exc}")
        return EXIT_CAP_EXCEEDED
    except InstanceError as exc:
        _note(f"error: {exc}")
        return EXIT_INPUT_ERROR
    except FileNotFoundError as exc:
        _note(f"error: {exc}")
        return EXIT_INPUT_ERROR
    except PopbranchError as exc:
        _note(f"internal error: {exc}")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
