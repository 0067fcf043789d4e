"""``bellmono`` command line.

Exit codes: 0 success (relation holds), 1 relation fails, 2 input or usage
error, 3 LP variable cap exceeded.  Results go to stdout; errors go to
stderr as JSON objects.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from bellmono import bell, monogamy, solve
from bellmono.bell import BellExpression
from bellmono.documents import (
    DocumentError,
    box_to_document,
    expression_from_document,
    expression_to_document,
    format_rational,
    read_json,
    write_json,
)

CATALOG = [
    {"name": "chsh", "scenario": "m_A=2, m_B=2, d=2", "provenance": "xor_game"},
    {"name": "chained-N", "scenario": "m_A=N, m_B=N, d=2 (N >= 2)", "provenance": "chained"},
    {"name": "claim3", "scenario": "m_A=3, m_B=3, d=4", "provenance": "table"},
    {"name": "identity-unique-dX-mAxmB", "scenario": "m_A, m_B, d=X", "provenance": "unique_game"},
]


class InputError(Exception):
    pass


def catalog_expression(name: str) -> BellExpression:
    if name == "chsh":
        return bell.chsh()
    if name == "claim3":
        return bell.claim3_expression()
    if m := re.fullmatch(r"chained-(\d+)", name):
        return bell.chained(int(m.group(1)))
    if m := re.fullmatch(r"identity-unique-d(\d+)-(\d+)x(\d+)", name):
        d, m_a, m_b = (int(g) for g in m.groups())
        return bell.identity_unique_game(d, m_a, m_b)
    raise InputError(f"unknown catalog expression {name!r}")


def _load(args) -> tuple[str, BellExpression]:
    if (args.name is None) == (args.file is None):
        raise InputError("give exactly one of a catalog name or --file")
    try:
        if args.file is not None:
            return args.file, expression_from_document(read_json(args.file))
        return args.name, catalog_expression(args.name)
    except (DocumentError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _cap() -> int:
    raw = os.environ.get("BELLMONO_LP_CAP")
    if raw is None:
        return monogamy.DEFAULT_CAP
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"BELLMONO_LP_CAP must be an integer, got {raw!r}") from None


def _emit(result: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(result, indent=1))
        return
    for key, value in result.items():
        if isinstance(value, list):
            value = "[" + ", ".join(map(str, value)) + "]"
        print(f"{key}: {value}")


def cmd_catalog(args) -> int:
    if args.json:
        print(json.dumps(CATALOG, indent=1))
    else:
        for entry in CATALOG:
            print(f"{entry['name']:<26} {entry['scenario']:<28} {entry['provenance']}")
    return 0


def cmd_bound(args) -> int:
    source, expr = _load(args)
    which = args.which or "both"
    result = {"expression": source}
    if which in ("local", "both"):
        value, strategy = solve.local_bound(expr)
        result["local"] = format_rational(value)
        result["local_strategy"] = {"alice": list(strategy.alice_outputs), "bob": list(strategy.bob_outputs)}
    if which in ("ns", "both"):
        sol = solve.ns_bound(expr)
        result["ns"] = format_rational(sol.value)
        if args.witness_out:
            write_json(args.witness_out, box_to_document(sol.witness))
    total = expr.weight_total()
    if total is not None:
        result["sum_mu"] = format_rational(total)
    if not args.json:
        result.pop("local_strategy", None)
    _emit(result, args.json)
    return 0


def _report_dict(expr, report) -> dict:
    return {
        "number": report.number,
        "witness_set": [expr.label(y) for y in report.witness_set],
        "restricted_local": format_rational(report.restricted_local),
        "restricted_ns": format_rational(report.restricted_ns),
        "strong": report.strong,
    }


def cmd_contradiction(args) -> int:
    source, expr = _load(args)
    report = monogamy.contradiction_number(expr, strong=args.strong)
    result = {"expression": source, **_report_dict(expr, report)}
    if args.all_minimal:
        sets = monogamy.minimal_removal_sets(expr, strong=args.strong)
        result["minimal_sets"] = [[expr.label(y) for y in s] for s in sets]
    _emit(result, args.json)
    return 0


def cmd_monogamy(args) -> int:
    source, expr = _load(args)
    cap = _cap()
    if args.bobs is not None and args.relation != "thm1":
        raise InputError("--bobs only applies to --relation thm1")
    try:
        if args.relation == "thm1":
            if args.bobs is None or args.bobs == expr.m_b:
                verdict = monogamy.check_general_monogamy(expr, cap=cap)
                in_scope = True
            else:
                if args.bobs < 1:
                    raise InputError("--bobs must be positive")
                sol = monogamy.extension_optimum(expr, args.bobs, cap=cap)
                rhs = args.bobs * solve.local_bound(expr)[0]
                verdict = monogamy.MonogamyVerdict(
                    "thm1", sol.value, rhs, sol.value <= rhs, sol.witness, args.bobs, False,
                    notes=("outside proven scope",),
                )
                in_scope = False
        elif args.relation == "eq4":
            certificate = monogamy.claim3_box() if args.name == "claim3" else None
            verdict = monogamy.check_strong_monogamy(expr, force=args.force, cap=cap, certificate=certificate)
            in_scope = verdict.in_proven_scope
        else:
            verdict = monogamy.strict_unique_monogamy(expr, cap=cap)
            in_scope = True
    except (monogamy.ScopeError, monogamy.PreconditionError, TypeError) as exc:
        raise InputError(str(exc)) from exc

    result = {
        "expression": source,
        "relation": verdict.relation,
        "bobs": verdict.num_bobs,
        "lhs": format_rational(verdict.lhs_optimum),
        "rhs": format_rational(verdict.rhs_bound),
        "holds": verdict.holds,
        "scope": "proven" if in_scope else "outside proven scope",
        "certified_by": verdict.certified_by,
    }
    if verdict.contradiction is not None:
        result["contradiction"] = _report_dict(expr, verdict.contradiction)
    if not args.json:
        result.pop("contradiction", None)
    _emit(result, args.json)
    return 0 if verdict.holds else 1


def _json_value(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, tuple):
        return [_json_value(v) for v in value]
    return value


def cmd_verify_claim3(args) -> int:
    report = monogamy.verify_claim3()
    if args.emit_box:
        write_json(args.emit_box, box_to_document(monogamy.claim3_box()))
    labels = bell.ROMAN
    if args.json:
        doc = {
            "passed": report.passed,
            "witness_set": [labels[y] for y in report.witness_set],
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "expected": _json_value(c.expected),
                    "actual": _json_value(c.actual),
                    **({"discrepancy": format_rational(c.discrepancy)} if c.discrepancy else {}),
                }
                for c in report.checks
            ],
        }
        print(json.dumps(doc, indent=1))
    else:
        for c in report.checks:
            line = f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {_json_value(c.actual)}"
            if c.discrepancy:
                line += f" (off by {format_rational(c.discrepancy)})"
            print(line)
        print(f"witness set: {[labels[y] for y in report.witness_set]}")
    return 0 if report.passed else 1


def cmd_export(args) -> int:
    _, expr = _load(args)
    print(json.dumps(expression_to_document(expr), indent=1))
    return 0


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("name", nargs="?", help="catalog expression name")
    p.add_argument("--file", help="ExpressionDocument JSON file")
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bellmono", description="Exact Bell-expression bounds and monogamy checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list built-in expressions")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("bound", help="local and no-signaling optima")
    _add_source(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--local", dest="which", action="store_const", const="local")
    g.add_argument("--ns", dest="which", action="store_const", const="ns")
    g.add_argument("--both", dest="which", action="store_const", const="both")
    p.add_argument("--witness-out", help="write the NS-optimal box as a BoxDocument")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("contradiction", help="contradiction number")
    _add_source(p)
    p.add_argument("--strong", action="store_true", help="strong contradiction number")
    p.add_argument("--all-minimal", action="store_true", help="list every minimal removal set")
    p.set_defaults(func=cmd_contradiction)

    p = sub.add_parser("monogamy", help="check a monogamy relation")
    _add_source(p)
    p.add_argument("--relation", choices=("thm1", "eq4", "obs1"), required=True)
    p.add_argument("--bobs", type=int, help="number of Bobs for thm1 (default m_B)")
    p.add_argument("--force", action="store_true", help="run eq4 outside its proven scope")
    p.set_defaults(func=cmd_monogamy)

    p = sub.add_parser("verify-claim3", help="certify the tripartite counterexample")
    p.add_argument("--emit-box", help="write the tripartite box as a BoxDocument")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify_claim3)

    p = sub.add_parser("export", help="print an expression as an ExpressionDocument")
    _add_source(p)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(json.dumps({"error": str(exc), "kind": "input"}), file=sys.stderr)
        return 2
    except monogamy.LpSizeError as exc:
        print(json.dumps({"error": str(exc), "kind": "lp_cap", "variables": exc.variables, "cap": exc.cap}), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
