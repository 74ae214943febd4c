"""Command-line front end.

Exit codes: 0 satisfied / all expectations met, 1 property violated or an
expectation refuted, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .datatypes import DatatypeSpec, GeneratorConfig, generate, validate_returns
from .errors import EptlError
from .evaluator import check_execution
from .formula import render
from .graph import DEFAULT_EXTENSION_BOUND
from .lawkit import MAX_EVENTS, MAX_PROPS, all_models, check_laws, get_law, law_catalog, render_reports
from .parser import parse
from .trace_io import dumps_trace, load_trace
from .values import format_value, value_to_json

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_domain_value(text: str):
    text = text.strip()
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    if len(text) >= 2 and text[0] == text[-1] == '"':
        return json.loads(text)
    return text


def _interp_json(interp: dict) -> dict:
    return {k: value_to_json(v) for k, v in sorted(interp.items())}


def _interp_text(interp: dict) -> str:
    return "{" + ", ".join(f"{k} -> {format_value(v)}" for k, v in sorted(interp.items())) + "}"


def cmd_check(args) -> int:
    A = load_trace(args.trace)
    if (args.formula is None) == (args.formula_file is None):
        raise UsageError("give exactly one of FORMULA or --formula-file")
    text = args.formula if args.formula is not None else Path(args.formula_file).read_text(encoding="utf-8")
    f = parse(text)
    domain = None
    if args.domain is not None:
        domain = [parse_domain_value(v) for v in args.domain.split(",") if v.strip()]
    verdict = check_execution(A, f, domain)
    mismatches = validate_returns(A, DatatypeSpec(args.datatype)) if args.datatype else []
    if args.dot:
        Path(args.dot).write_text(A.to_dot(), encoding="utf-8")
    ok = verdict.satisfied and not mismatches

    if args.json:
        report = {
            "schema_version": SCHEMA_VERSION,
            "formula": render(f),
            "satisfied": verdict.satisfied,
            "interpretations": verdict.interpretations,
            "failures": [
                {"start": x.start, "interpretation": _interp_json(x.interpretation), "path": list(x.path), "event": x.event}
                for x in verdict.failures
            ],
        }
        if args.datatype:
            report["datatype"] = args.datatype
            report["return_mismatches"] = [
                {"event": e, "expected": value_to_json(exp), "recorded": None if got is None else value_to_json(got)}
                for e, exp, got in mismatches
            ]
        print(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        state = "satisfied" if verdict.satisfied else "VIOLATED"
        print(f"{render(f)}: {state} ({verdict.interpretations} interpretation(s), {len(A)} event(s))")
        for x in verdict.failures:
            print(f"  start {x.start} under {_interp_text(x.interpretation)}: violated at {x.event}")
        for e, exp, got in mismatches:
            shown = "nothing" if got is None else format_value(got)
            print(f"  return mismatch at {e}: expected {format_value(exp)}, recorded {shown}")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_gen(args) -> int:
    config = GeneratorConfig(
        replicas=args.replicas,
        ops=args.ops,
        seed=args.seed,
        datatype=args.datatype,
        merge_probability=args.merge_prob,
    )
    text = dumps_trace(generate(config))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_laws(args) -> int:
    if args.law:
        try:
            laws = [get_law(args.law)]
        except KeyError:
            raise UsageError(f"unknown law {args.law!r}; try one of: {', '.join(l.name for l in law_catalog())}")
    else:
        laws = law_catalog()
    reports = check_laws(laws, all_models(args.max_events, args.props), props=args.props)
    if args.json:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "max_events": args.max_events,
            "props": args.props,
            "laws": [r.to_json() for r in reports],
        }
        print(json.dumps(doc, indent=2))
    else:
        print(render_reports(reports))
    return EXIT_OK if all(r.ok for r in reports) else EXIT_VIOLATION


def cmd_serialize(args) -> int:
    A = load_trace(args.trace)
    for order in A.linear_extensions(bound=args.bound):
        print(",".join(order))
    return EXIT_OK


def cmd_dot(args) -> int:
    sys.stdout.write(load_trace(args.trace).to_dot())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eptl", description="EPTL checking over abstract executions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check a trace against a formula")
    p.add_argument("trace")
    p.add_argument("formula", nargs="?")
    p.add_argument("-f", "--formula-file")
    p.add_argument("--domain", help="comma-separated interpretation domain, overriding the trace values")
    p.add_argument("--datatype", choices=["mvr", "counter"], help="also validate get return values")
    p.add_argument("--dot", help="write the event graph as DOT to this path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="generate a causally consistent random trace")
    p.add_argument("--replicas", type=int, default=2)
    p.add_argument("--ops", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--datatype", default="mvr")
    p.add_argument("--merge-prob", type=float, default=0.3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("laws", help="check the law catalog on all small models")
    p.add_argument("--max-events", type=int, default=4, help=f"at most {MAX_EVENTS}")
    p.add_argument("--props", type=int, default=2, help=f"at most {MAX_PROPS}")
    p.add_argument("--law")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_laws)

    p = sub.add_parser("serialize", help="list every linear extension of a trace")
    p.add_argument("trace")
    p.add_argument("--bound", type=int, default=DEFAULT_EXTENSION_BOUND)
    p.set_defaults(func=cmd_serialize)

    p = sub.add_parser("dot", help="print the event graph in DOT")
    p.add_argument("trace")
    p.set_defaults(func=cmd_dot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (EptlError, UsageError, OSError) as exc:
        print(f"eptl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
