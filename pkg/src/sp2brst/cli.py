"""Command-line pipeline.

Subcommands:

    solve FILE            construct the charges and verify the master
                          equations degree by degree
    lift FILE             solve, then extend a named observable and check
                          the realization laws
    check-identities      run the seeded operator-identity suite
    verify FILE OMEGA     re-verify a previously emitted charge document

Exit codes: 0 all checks pass; 1 a verification failed (nonzero
residual, method disagreement, non-first-class observable); 2 input
error (bad document, bad expression, Jacobi-violating structure table,
or the SP2_BRST_MAX_TERMS safety cap was exceeded).

Reports on standard output are deterministic functions of the inputs;
timings go to standard error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import expr
from .algebra import Algebra, TheoryError
from .identities import run_identity_suite
from .observables import NotFirstClassError, check_first_class, lift, verify_realization
from .solver import (DEFAULT_MAX_TERMS, ConventionError, Method, SolverConfig,
                     TermBudgetError, boundary_violations, solve, verify_master)
from .theoryfile import (TheoryDocument, TheoryFileError, build_algebra,
                         dump_document, load_omega, observable_document,
                         omega_document, parse_theory, validate_jacobi)

OK, FAIL, INPUT_ERROR = 0, 1, 2
DEFAULT_ORDER = 4


def _max_terms() -> int:
    raw = os.environ.get("SP2_BRST_MAX_TERMS")
    if raw is None:
        return DEFAULT_MAX_TERMS
    try:
        value = int(raw)
        if value <= 0:
            raise ValueError
    except ValueError:
        raise TheoryFileError(
            f"SP2_BRST_MAX_TERMS must be a positive integer, got {raw!r}")
    return value


def _load(path: str) -> tuple:
    with open(path, "rb") as fh:
        doc = parse_theory(fh.read())
    alg = build_algebra(doc)
    return doc, alg


def _header(doc: TheoryDocument) -> str:
    spec = doc.spec
    return (f"theory {spec.label}: {spec.m} constraints, "
            f"{spec.n_physical} physical coordinates")


def _check_jacobi(alg: Algebra) -> tuple:
    report = validate_jacobi(alg)
    return report.ok, report.render()


def _order(args, doc: TheoryDocument) -> int:
    if args.order is not None:
        return args.order
    if doc.order is not None:
        return doc.order
    return DEFAULT_ORDER


def _write_out(path: str, document: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_document(document))


def _omega_summary(res) -> list:
    rows = []
    for a in (1, 2):
        comp = res.omega.get((a,))
        counts = ", ".join(
            f"degree {d}: {comp.cp_part(d).term_count()}"
            for d in range(res.config.k + 1) if comp.cp_part(d).term_count())
        rows.append(f"Omega^{a} terms by cp-degree: {counts or 'none'}")
    for a in (1, 2):
        rows.append(f"Omega^{a} = {expr.serialize(res.omega.get((a,)))}")
    return rows


def cmd_solve(args) -> int:
    doc, alg = _load(args.file)
    print(_header(doc))
    ok, text = _check_jacobi(alg)
    print(text)
    if not ok:
        return INPUT_ERROR
    config = SolverConfig(k=_order(args, doc), method=Method(args.method),
                          max_terms=_max_terms())
    try:
        res = solve(doc.spec, config, algebra=alg)
    except ConventionError as e:
        print(f"verification failed: {e}")
        return FAIL
    for row in _omega_summary(res):
        print(row)
    print(res.render())
    if args.out:
        _write_out(args.out, omega_document(doc.spec.label, config.k, res.omega))
    return OK if res.ok else FAIL


def cmd_lift(args) -> int:
    doc, alg = _load(args.file)
    print(_header(doc))
    ok, text = _check_jacobi(alg)
    print(text)
    if not ok:
        return INPUT_ERROR
    name = args.observable
    source = doc.observable(name)
    try:
        phi0 = expr.parse(alg, source)
    except expr.ExprError as e:
        raise TheoryFileError(f"observable {name}: {e}") from None
    config = SolverConfig(k=_order(args, doc), method=Method(args.method),
                          max_terms=_max_terms())
    try:
        res = solve(doc.spec, config, algebra=alg)
    except ConventionError as e:
        print(f"verification failed: {e}")
        return FAIL
    if not res.ok:
        print(res.render())
        return FAIL
    print(f"observable {name} = {expr.serialize(phi0)}")
    try:
        lifted = lift(phi0, res, max_terms=_max_terms())
    except NotFirstClassError as e:
        print(f"rejected: {e}")
        return FAIL
    print(lifted.render())
    print(f"Phi' = {expr.serialize(lifted.phi_prime)}")
    status = lifted.ok
    for other_name, other_source in doc.observables:
        if other_name == name:
            continue
        other = expr.parse(alg, other_source)
        if not check_first_class(other, alg).ok:
            print(f"realization with {other_name}: skipped (not first class)")
            continue
        other_lift = lift(other, res, max_terms=_max_terms())
        realization = verify_realization(lifted, other_lift)
        print(f"realization with {other_name}: " + realization.render())
        status = status and other_lift.ok and realization.ok
    if args.out:
        _write_out(args.out, observable_document(
            doc.spec.label, name, config.k, phi0, lifted.phi_prime))
    return OK if status else FAIL


def cmd_check_identities(args) -> int:
    spec = None
    if args.theory:
        doc, alg = _load(args.theory)
        ok, text = _check_jacobi(alg)
        print(text)
        if not ok:
            return INPUT_ERROR
        spec = doc.spec
    report = run_identity_suite(degree=args.degree, samples=args.samples,
                                seed=args.seed, spec=spec)
    print(report.render())
    return OK if report.ok else FAIL


def cmd_verify(args) -> int:
    doc, alg = _load(args.file)
    print(_header(doc))
    ok, text = _check_jacobi(alg)
    print(text)
    if not ok:
        return INPUT_ERROR
    with open(args.omega_file, "rb") as fh:
        omega, order = load_omega(fh.read(), alg)
    print(f"loaded charge document at truncation order {order}")
    report = verify_master(omega, order)
    print(report.render())
    problems = boundary_violations(omega)
    if problems:
        for p in problems:
            print(f"boundary condition violated: {p}")
    else:
        print("boundary conditions: satisfied")
    passed = report.ok and not problems
    print("verification: " + ("passed" if passed else "FAILED"))
    return OK if passed else FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sp2brst",
        description="Exact construction and verification of Sp(2)-symmetric "
                    "BRST charges and lifted observables.")
    sub = parser.add_subparsers(dest="command", required=True)
    methods = [m.value for m in Method]

    p_solve = sub.add_parser("solve", help="construct and verify the charges")
    p_solve.add_argument("file", help="theory document (JSON)")
    p_solve.add_argument("--order", type=int, default=None,
                         help="truncation cp-degree (default: document order)")
    p_solve.add_argument("--method", choices=methods, default=Method.BOTH.value)
    p_solve.add_argument("--out", default=None, help="write the charges to a JSON file")
    p_solve.set_defaults(func=cmd_solve)

    p_lift = sub.add_parser("lift", help="lift a named observable")
    p_lift.add_argument("file", help="theory document (JSON)")
    p_lift.add_argument("--observable", required=True,
                        help="name or 1-based index of a document observable")
    p_lift.add_argument("--order", type=int, default=None)
    p_lift.add_argument("--method", choices=methods, default=Method.BOTH.value)
    p_lift.add_argument("--out", default=None, help="write the lift to a JSON file")
    p_lift.set_defaults(func=cmd_lift)

    p_ident = sub.add_parser("check-identities",
                             help="run the seeded operator-identity suite")
    p_ident.add_argument("--degree", type=int, default=4)
    p_ident.add_argument("--samples", type=int, default=100)
    p_ident.add_argument("--seed", type=int, default=0)
    p_ident.add_argument("--theory", default=None,
                         help="optional theory document to sample over")
    p_ident.set_defaults(func=cmd_check_identities)

    p_verify = sub.add_parser("verify", help="re-verify an emitted charge document")
    p_verify.add_argument("file", help="theory document (JSON)")
    p_verify.add_argument("omega_file", help="charge document emitted by solve --out")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.monotonic()
    try:
        code = args.func(args)
    except (TheoryFileError, TheoryError, expr.ExprError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR
    except TermBudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR
    finally:
        print(f"[{time.monotonic() - started:.2f}s]", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
