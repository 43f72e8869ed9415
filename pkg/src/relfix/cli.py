"""Command line entry points.

    relfix solve   --spec FILE [--depth N] [--max-size K] [--emit-dot DIR]
    relfix relate  --spec FILE [--method kt|banach|kleene|all] [--depth N]
    relfix karoubi --poset LITERAL
    relfix check   --suite NAME

Shared flags: --seed S, --report FILE, --timings.  Exit codes: 0 ok,
1 verification failure, 2 usage or parse trouble, 3 resource cap.
Reports are canonical JSON (sorted keys, trailing newline) and contain
no timing data; --timings prints wall times to stderr only, so reports
stay byte-identical for identical (spec, seed, version) triples.
Precedence for depth/seed/caps: command line, then spec file, then
defaults.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from .chain import build_chain, truncation_projections
from .config import Caps, DEFAULT_CAPS
from .dsl import parse_poset_literal, parse_spec
from .engines import (
    compare_methods,
    solve_banach,
    solve_kleene,
    solve_knaster_tarski,
)
from .errors import (
    InadmissibleRelation,
    ParseError,
    RelfixError,
    ResolveError,
    SizeCapExceeded,
)
from .karoubi import (
    KaroubiObj,
    ed_cpo_check,
    ed_slice_equivalence,
    enumerate_canonical_idempotents,
    karoubi_rel_fiber,
)
from .report import make_report, write_report
from .suites import all_suites, run_suite

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="relfix",
        description="workbench for relational structures over recursive domain equations",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, spec=False, poset=False, suite=False, method=False, dot=False):
        if spec:
            p.add_argument("--spec", required=True, help="spec file (DSL)")
            p.add_argument("--depth", type=int, help="override spec depth")
            p.add_argument(
                "--max-size",
                type=int,
                dest="max_size",
                help="override the carrier-size cap",
            )
        if poset:
            p.add_argument(
                "--poset", required=True, help="poset literal, e.g. chain(3)"
            )
        if suite:
            p.add_argument(
                "--suite",
                required=True,
                choices=sorted(all_suites()) + ["all", "corrupted"],
            )
        if method:
            p.add_argument(
                "--method",
                choices=["kt", "banach", "kleene", "all"],
                default="all",
            )
        if dot:
            p.add_argument(
                "--emit-dot", dest="emit_dot", help="directory for Hasse DOT files"
            )
        p.add_argument("--seed", type=int, help="recorded in the report")
        p.add_argument("--report", help="write the JSON report here")
        p.add_argument(
            "--timings",
            action="store_true",
            help="print wall times to stderr (never in reports)",
        )

    common(sub.add_parser("solve", help="build the chain and verify it"), spec=True, dot=True)
    common(sub.add_parser("relate", help="solve the relation by fixed point"), spec=True, method=True)
    common(sub.add_parser("karoubi", help="idempotent structure of a poset"), poset=True)
    common(sub.add_parser("check", help="run a property suite"), suite=True)
    return top


def _load_spec(args):
    try:
        with open(args.spec, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"relfix: cannot read spec: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    spec = parse_spec(text)
    depth = args.depth if args.depth is not None else spec.depth
    if depth is None:
        print("relfix: no depth given (spec or --depth)", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    caps = spec.effective_caps()
    if getattr(args, "max_size", None) is not None:
        caps = Caps(max_elements=args.max_size, max_pairs=caps.max_pairs)
    seed = args.seed if args.seed is not None else (spec.seed or 0)
    return spec, depth, caps, seed


def _emit(args, report: dict) -> None:
    text = write_report(report, args.report)
    if args.report is None:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    spec, depth, caps, seed = _load_spec(args)
    t0 = time.monotonic()
    chain = build_chain(spec.functor, depth, caps)
    pis, verification = truncation_projections(chain)
    if args.emit_dot:
        os.makedirs(args.emit_dot, exist_ok=True)
        for i, level in enumerate(chain.levels):
            path = os.path.join(args.emit_dot, f"X_{i}.dot")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(level.to_dot(name=f"X_{i}"))
    checks = verification["checks"] if isinstance(verification, dict) else verification
    result = {
        "domain": spec.domain_name,
        "depth": depth,
        "sizes": [p.n for p in chain.levels],
        "pi_tables": [list(pi.table) for pi in pis],
        "verification": checks,
    }
    if args.timings:
        print(f"solve: {time.monotonic() - t0:.3f}s", file=sys.stderr)
    _emit(args, make_report("solve", spec.source, seed, result))
    return EXIT_OK


def cmd_relate(args) -> int:
    spec, depth, caps, seed = _load_spec(args)
    t0 = time.monotonic()
    chain = build_chain(spec.functor, depth, caps)
    if args.method == "all":
        result = compare_methods(chain)
    elif args.method == "kt":
        pair, iterations = solve_knaster_tarski(chain)
        result = {
            "method": "knaster_tarski",
            "iterations": iterations,
            "neg_equals_pos": all(
                pair.neg[m] == pair.pos[m] for m in range(depth + 1)
            ),
            "family": [pair.pos[m].sorted_pairs() for m in range(depth + 1)],
        }
    elif args.method == "kleene":
        fam = solve_kleene(chain)
        result = {
            "method": "kleene",
            "family": [fam[m].sorted_pairs() for m in range(depth + 1)],
        }
    else:
        fam, profile = solve_banach(chain)
        result = {
            "method": "banach",
            "stabilization_profile": profile,
            "family": [fam[m].sorted_pairs() for m in range(depth + 1)],
        }
    result["sizes"] = [p.n for p in chain.levels]
    if args.timings:
        print(f"relate[{args.method}]: {time.monotonic() - t0:.3f}s", file=sys.stderr)
    _emit(args, make_report("relate", spec.source, seed, result))
    return EXIT_OK


def cmd_karoubi(args) -> int:
    poset = parse_poset_literal(args.poset)
    t0 = time.monotonic()
    idems = enumerate_canonical_idempotents(poset)
    result = {
        "poset": args.poset,
        "size": poset.n,
        "ed_size": len(idems),
        "cpo": ed_cpo_check(poset),
        "slice_equivalence": ed_slice_equivalence(poset),
    }
    audits = []
    for p in idems:
        try:
            audits.append(karoubi_rel_fiber(KaroubiObj(poset, p)))
        except SizeCapExceeded:
            audits.append(
                {"idempotent": list(p.mor.table), "skipped": "relation space over cap"}
            )
    result["claim_audit"] = audits
    ok = result["cpo"]["ok"] and result["slice_equivalence"]["ok"]
    result["ok"] = ok
    if args.timings:
        print(f"karoubi: {time.monotonic() - t0:.3f}s", file=sys.stderr)
    _emit(args, make_report("karoubi", args.poset, args.seed or 0, result))
    return EXIT_OK if ok else EXIT_VERIFICATION


def cmd_check(args) -> int:
    t0 = time.monotonic()
    result = run_suite(args.suite)
    if args.timings:
        print(f"check[{args.suite}]: {time.monotonic() - t0:.3f}s", file=sys.stderr)
    _emit(args, make_report("check", args.suite, args.seed or 0, result))
    return EXIT_OK if result["ok"] else EXIT_VERIFICATION


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "solve": cmd_solve,
        "relate": cmd_relate,
        "karoubi": cmd_karoubi,
        "check": cmd_check,
    }[args.command]
    try:
        return handler(args)
    except (ParseError, ResolveError, InadmissibleRelation) as exc:
        print(f"relfix: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeCapExceeded as exc:
        print(f"relfix: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except RelfixError as exc:
        print(f"relfix: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
