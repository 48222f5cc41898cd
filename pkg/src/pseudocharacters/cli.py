"""Command-line front end.

Exit codes: 0 pass / globally conjugate, 1 fail / not conjugate,
2 malformed input or precondition, 3 element-conjugate only.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .conjugacy import build_rho_2n, compare, so_counterexample_criterion
from .documents import (
    DocumentError,
    cyclic_doc,
    document_kind,
    dump_json,
    load_json,
    product_doc,
    pseudochar_from_doc,
    representation_from_doc,
    representation_to_doc,
)
from .linalg import format_rational, linearized_pfaffian, pl_block_oracle
from .pseudochar import DEFAULT_BUDGET, PseudocharData, verify
from .relations import BudgetError, f_relation, format_polynomial, g_relation, gl_relation
from .representations import DEFAULT_MAX_ORDER, trace_function

EXIT_OK, EXIT_FAIL, EXIT_MALFORMED, EXIT_ELEMENT_ONLY = 0, 1, 2, 3

FAMILY_NAMES = {"gl": "GL", "o": "O", "go": "GO", "so": "SO", "sp": "Sp", "gsp": "GSp"}


def _family(text: str) -> str:
    try:
        return FAMILY_NAMES[text.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"unknown family {text!r}; choose from {', '.join(FAMILY_NAMES)}") from None


class UsageError(ValueError):
    pass


# -- emit-relations ----------------------------------------------------------

def cmd_emit_relations(args) -> int:
    n = args.n
    if n is None or n < 1:
        raise UsageError("--n must be a positive integer")
    if args.family == "GL":
        print(format_polynomial(gl_relation(n)))
        return EXIT_OK
    if args.family not in ("O", "GO"):
        raise UsageError("emit-relations supports --family gl, o or go")
    build = f_relation if args.family == "O" else g_relation
    js = [args.j] if args.j is not None else range((n + 1) // 2 + 1)
    for j in js:
        text = format_polynomial(build(n, j))
        print(text if args.j is not None else f"[j={j}] {text}")
    return EXIT_OK


# -- verify --------------------------------------------------------------------

def _load_pseudochar(path: str, family: str, dim: int | None, max_order: int) -> PseudocharData:
    doc = load_json(path)
    kind = document_kind(doc)
    if kind == "pseudocharacter":
        d = pseudochar_from_doc(doc, max_order)
    elif kind == "representation":
        d = trace_function(representation_from_doc(doc, max_order), family)
    else:
        raise DocumentError(f"{path}: expected a pseudocharacter or representation document")
    if dim is not None and dim != d.dim:
        # P and the model belong to the original dimension
        d = PseudocharData(d.group, dim, d.T, d.l)
    return d


def cmd_verify(args) -> int:
    worst = EXIT_OK
    reports = []
    for path in args.files:
        d = _load_pseudochar(path, args.family, args.n, args.max_order)
        rep = verify(d, args.family, args.budget, args.seed)
        reports.append((path, rep))
        if not rep.passed:
            worst = EXIT_FAIL
    if args.json:
        out = [dict(rep.to_dict(args.max_violations), file=path) for path, rep in reports]
        print(json.dumps(out if len(out) > 1 else out[0], indent=2, sort_keys=True))
    else:
        for k, (path, rep) in enumerate(reports):
            if k:
                print()
            if len(reports) > 1:
                print(f"file: {path}")
            print(rep.to_text(args.max_violations))
    return worst


# -- conjugacy-compare -------------------------------------------------------------

def cmd_conjugacy(args) -> int:
    r1 = representation_from_doc(load_json(args.rep1), args.max_order)
    r2 = representation_from_doc(load_json(args.rep2), args.max_order)
    if r1.group != r2.group:
        raise DocumentError("the two representations are over different groups")
    if r1.dim != r2.dim:
        raise DocumentError(f"dimensions differ: {r1.dim} vs {r2.dim}")
    verdict = compare(r1, r2, args.family, args.budget)
    print(json.dumps(verdict.to_dict(), indent=2, sort_keys=True) if args.json else verdict.to_text())
    if verdict.globally_conjugate:
        return EXIT_OK
    return EXIT_ELEMENT_ONLY if verdict.element_conjugate else EXIT_FAIL


# -- so-counterexample ---------------------------------------------------------------

def counterexample_report(n: int, budget: int = DEFAULT_BUDGET) -> tuple[dict, dict]:
    """Representation document for ``rho_{2n}`` and its criterion report."""
    rep = build_rho_2n(n)
    crit = so_counterexample_criterion(rep, budget)
    report = {"n": n, "dim": 2 * n, "group": "Z/4 x Z/4"}
    report.update(crit.to_dict(rep.group))
    if crit.witness is not None:
        mats = [rep.images[g] for g in crit.witness]
        report["value_linearized_pfaffian"] = format_rational(linearized_pfaffian(mats))
        report["value_block_oracle"] = format_rational(pl_block_oracle(mats))
    group_doc = product_doc(cyclic_doc(4), cyclic_doc(4))
    return representation_to_doc(rep, group_doc), report


def cmd_counterexample(args) -> int:
    if args.n is None or args.n < 3:
        raise UsageError(f"so-counterexample needs --n >= 3, got {args.n}")
    rep_doc, report = counterexample_report(args.n, args.budget)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dump_json(rep_doc, out / f"rho_{2 * args.n}.json")
    dump_json(report, out / f"rho_{2 * args.n}_criterion.json")
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(f"rho_{2 * args.n}: criterion {'holds' if report['holds'] else 'fails'}")
        if report["witness"]:
            print(f"witness: ({', '.join(report['witness'])})")
            print(f"pl = {report['value']} (block oracle {report['value_block_oracle']})")
        if report["blocking"]:
            print(f"det(rho(g) - rho(g)^t) != 0 at {report['blocking']}")
        print(f"wrote {out / f'rho_{2 * args.n}.json'} and {out / f'rho_{2 * args.n}_criterion.json'}")
    return EXIT_OK if report["holds"] else EXIT_FAIL


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pseudochar", description="Pseudocharacters of classical groups over finite groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family_required=True):
        p.add_argument("--family", type=_family, required=family_required)
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="tuple budget (default %(default)s)")
        p.add_argument("--seed", type=int, default=0, help="sampling seed (default %(default)s)")
        p.add_argument("--max-order", type=int, default=DEFAULT_MAX_ORDER, help="closure size limit")
        p.add_argument("--json", action="store_true", help="machine-readable report")

    p = sub.add_parser("emit-relations", help="print trace relation polynomials")
    p.add_argument("--family", type=_family, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--j", type=int)
    p.set_defaults(func=cmd_emit_relations)

    p = sub.add_parser("verify", help="check pseudocharacter axioms")
    p.add_argument("files", nargs="+")
    common(p)
    p.add_argument("--n", type=int, help="declared dimension (overrides the document)")
    p.add_argument("--max-violations", type=int, default=10)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("conjugacy-compare", help="element vs global conjugacy of two representations")
    p.add_argument("rep1")
    p.add_argument("rep2")
    common(p)
    p.set_defaults(func=cmd_conjugacy)

    p = sub.add_parser("so-counterexample", help="build rho_2n and check the SO criterion")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=".", help="output directory (default: current)")
    common(p, family_required=False)
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code else EXIT_OK
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (ValueError, OSError) as exc:
        # DocumentError, UsageError and the library's validation errors are all ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
