"""Command-line interface.

Subcommands: check, derive, clone, solid, theorem41, infer.  Exit codes are
uniform: 0 the requested property holds (all axioms hold / family solid /
all sweep entries agree / closures equal), 1 it does not, 2 input error,
3 inconclusive (clone cap hit before a definite answer).

Output is plain text by default; --format json switches the whole report to
line-delimited JSON objects, each carrying a "kind" field.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .algebra import (
    DEFAULT_CLONE_CAP,
    EvalError,
    FiniteAlgebra,
    derived_algebra,
    enumerate_term_operations,
    load_algebra,
    print_algebra,
)
from .hypersubst import HsubMonoid, generate_monoid, load_hsubs
from .inference import (
    Bounds,
    birkhoff_closure,
    compare_closures,
    hyper_closure,
    m_hyper_closure,
)
from .satisfaction import (
    HyperVerdict,
    Verdict,
    check_hyper_quasi_identity,
    check_hyperidentity,
    check_identity,
    check_quasi_identity,
)
from .solidity import check_solid, format_theorem_report, sweep_theorem
from .syntax import ParseError, Signature, Theory, load_theory

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3


class InputError(Exception):
    pass


def _clone_cap(args) -> int:
    if getattr(args, "cap", None):
        return args.cap
    env = os.environ.get("HYPERQ_CLONE_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"bad HYPERQ_CLONE_CAP value {env!r}") from None
    return DEFAULT_CLONE_CAP


def _align_algebra(A: FiniteAlgebra, sig: Signature) -> FiniteAlgebra:
    """Reorder the algebra's tables to the theory's signature order."""
    if A.signature == sig:
        return A
    mine = dict(A.signature.symbols)
    theirs = dict(sig.symbols)
    if mine != theirs:
        raise InputError(
            f"signature mismatch: algebra has {sorted(mine.items())}, "
            f"theory has {sorted(theirs.items())}"
        )
    tables = tuple(A.table(name) for name, _ in sig.symbols)
    return FiniteAlgebra(A.name, A.carrier_size, sig, tables)


def _load_algebra(path) -> FiniteAlgebra:
    try:
        return load_algebra(path)
    except FileNotFoundError:
        raise InputError(f"algebra file not found: {path}") from None
    except ParseError as e:
        raise InputError(f"{path}: {e}") from None


def _load_theory(path) -> Theory:
    try:
        return load_theory(path)
    except FileNotFoundError:
        raise InputError(f"theory file not found: {path}") from None
    except ParseError as e:
        raise InputError(f"{path}: {e}") from None


def _load_monoid(path, sig: Signature) -> HsubMonoid:
    try:
        gens = load_hsubs(path, sig)
    except FileNotFoundError:
        raise InputError(f"hsub file not found: {path}") from None
    except ParseError as e:
        raise InputError(f"{path}: {e}") from None
    return generate_monoid(gens)


def _emit(args, obj: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(obj, sort_keys=True))
    else:
        print(text)


def _verdict_json(v: Verdict | HyperVerdict) -> dict:
    if isinstance(v, Verdict):
        ce = None
        if v.counterexample:
            ce = {
                "env": v.counterexample.env,
                "lhs": v.counterexample.lhs_value,
                "rhs": v.counterexample.rhs_value,
            }
        return {"holds": v.holds, "counterexample": ce}
    ce = None
    if v.counterexample:
        ce = {
            "hsub": str(v.counterexample.hsub),
            "env": v.counterexample.env,
            "induced": str(v.counterexample.induced),
        }
    return {"holds": v.holds, "counterexample": ce, "conclusive": v.conclusive}


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def cmd_check(args) -> int:
    theory = _load_theory(args.theory)
    A = _align_algebra(_load_algebra(args.algebra), theory.signature)
    M = _load_monoid(args.monoid, theory.signature) if args.monoid else None
    cap = _clone_cap(args)
    mode = args.mode
    if mode in ("id", "hyper") and any(ax.premises for ax in theory.axioms):
        raise InputError(f"mode {mode} requires premise-free axioms")

    failures = 0
    inconclusive = False
    for i, ax in enumerate(theory.axioms):
        if mode == "id":
            v: Verdict | HyperVerdict = check_identity(A, ax.conclusion)
        elif mode == "qid":
            v = check_quasi_identity(A, ax)
        elif mode == "hyper":
            v = check_hyperidentity(A, ax.conclusion, M, cap)
        else:
            v = check_hyper_quasi_identity(A, ax, M, cap)
        if not v.holds:
            failures += 1
        if isinstance(v, HyperVerdict) and v.holds and not v.conclusive:
            inconclusive = True
        obj = {"kind": "axiom", "index": i, "mode": mode, "axiom": str(ax)}
        obj.update(_verdict_json(v))
        status = "holds" if v.holds else "FAILS"
        detail = ""
        if isinstance(v, Verdict) and v.counterexample:
            detail = f"  env={v.counterexample.env} lhs={v.counterexample.lhs_value} rhs={v.counterexample.rhs_value}"
        elif isinstance(v, HyperVerdict) and v.counterexample:
            detail = (
                f"  hsub[{v.counterexample.hsub}] env={v.counterexample.env}"
                f" induced[{v.counterexample.induced}]"
            )
        elif isinstance(v, HyperVerdict) and not v.conclusive:
            detail = "  (lower bound only: clone cap hit)"
        _emit(args, obj, f"axiom {i}: {ax}  {status}{detail}")
    if failures:
        return EXIT_FAIL
    if inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_derive(args) -> int:
    A = _load_algebra(args.algebra)
    try:
        hsubs = load_hsubs(args.hsub, A.signature)
    except FileNotFoundError:
        raise InputError(f"hsub file not found: {args.hsub}") from None
    except ParseError as e:
        raise InputError(f"{args.hsub}: {e}") from None
    if len(hsubs) != 1:
        raise InputError("derive expects exactly one hypersubstitution in the file")
    B = derived_algebra(A, hsubs[0])
    sys.stdout.write(print_algebra(B))
    return EXIT_OK


def cmd_clone(args) -> int:
    A = _load_algebra(args.algebra)
    if args.arity < 1:
        raise InputError("arity must be at least 1")
    cap = _clone_cap(args)
    if cap < 1:
        raise InputError("cap must be positive")
    sl = enumerate_term_operations(A, args.arity, cap)
    _emit(
        args,
        {"kind": "summary", "count": len(sl.ops), "complete": sl.complete},
        f"{len(sl.ops)} term operations of arity {args.arity}"
        + ("" if sl.complete else " (INCOMPLETE: cap hit)"),
    )
    for i, op in enumerate(sl.ops):
        table = ",".join(map(str, op.table))
        _emit(
            args,
            {"kind": "op", "index": i, "table": list(op.table), "witness": str(op.witness)},
            f"[{table}]  {op.witness}",
        )
    return EXIT_OK if sl.complete else EXIT_INCONCLUSIVE


def cmd_solid(args) -> int:
    theory = _load_theory(args.theory)
    algebras = [_align_algebra(_load_algebra(p), theory.signature) for p in args.algebra]
    M = _load_monoid(args.monoid, theory.signature) if args.monoid else None
    report = check_solid(algebras, theory, M, _clone_cap(args))
    for entry in report.entries:
        obj = {
            "kind": "algebra",
            "name": entry.algebra.name,
            "in_family": entry.in_family,
            "derived_total": entry.derived_total,
            "derived_failures": len(entry.derived_failures),
        }
        if entry.in_family:
            text = (
                f"{entry.algebra.name}: member, {entry.derived_total} derived, "
                + ("all satisfy axioms" if entry.all_derived_ok
                   else f"{len(entry.derived_failures)} derived algebras fail")
            )
        else:
            text = f"{entry.algebra.name}: not a member (reported only)"
        _emit(args, obj, text)
    _emit(
        args,
        {"kind": "summary", "solid": report.solid, "conclusive": report.conclusive},
        f"solid: {str(report.solid).lower()}",
    )
    if not report.conclusive and report.solid:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if report.solid else EXIT_FAIL


def cmd_theorem41(args) -> int:
    theory = _load_theory(args.theory)
    M = _load_monoid(args.monoid, theory.signature) if args.monoid else None
    if args.carrier > 3 and args.sample is None:
        raise InputError("carriers above 3 require --sample")
    try:
        report = sweep_theorem(
            args.carrier, theory, M, args.sample, args.seed, _clone_cap(args),
            jobs=args.jobs,
        )
    except ValueError as e:
        raise InputError(str(e)) from None
    if args.format == "json":
        for e in report.entries:
            print(
                json.dumps(
                    {
                        "kind": "algebra",
                        "id": e.algebra_id,
                        "skipped": e.skipped,
                        "lhs": e.lhs,
                        "rhs": e.rhs,
                        "agree": e.agree,
                    },
                    sort_keys=True,
                )
            )
        print(
            json.dumps(
                {"kind": "summary", "agree": report.agree_count, "total": report.total},
                sort_keys=True,
            )
        )
    else:
        sys.stdout.write(format_theorem_report(report))
    if not all(e.conclusive for e in report.entries):
        return EXIT_INCONCLUSIVE
    return EXIT_OK if report.all_agree else EXIT_FAIL


def cmd_infer(args) -> int:
    theory = _load_theory(args.theory)
    if any(ax.premises for ax in theory.axioms):
        raise InputError("infer works on identities: axioms must be premise-free")
    eqs = [ax.conclusion for ax in theory.axioms]
    bounds = Bounds(args.max_term_size, args.max_steps, args.image_size)
    sig = theory.signature
    M = _load_monoid(args.monoid, sig) if args.monoid else None

    if args.compare:
        cmp = compare_closures(sig, eqs, M, bounds)
        _emit(
            args,
            {
                "kind": "summary",
                "e_size": cmp.e.size,
                "eh_size": cmp.eh.size,
                "emh_size": cmp.emh.size if cmp.emh else None,
                "e_equals_eh": cmp.e_equals_eh,
                "e_equals_emh": cmp.e_equals_emh,
            },
            cmp.summary(),
        )
        equal = cmp.e_equals_eh and (cmp.e_equals_emh is not False)
        return EXIT_OK if equal else EXIT_FAIL

    if args.rules == "E":
        closure = birkhoff_closure(sig, eqs, bounds)
    elif args.rules == "EH":
        closure = hyper_closure(sig, eqs, bounds)
    else:
        if M is None:
            raise InputError("--rules EMH requires --monoid")
        closure = m_hyper_closure(sig, eqs, M, bounds)
    header = f"rules={closure.rules} size={closure.size} saturated={str(closure.saturated).lower()}"
    _emit(
        args,
        {
            "kind": "header",
            "rules": closure.rules,
            "size": closure.size,
            "saturated": closure.saturated,
        },
        header,
    )
    lines = sorted(str(eq) for eq in closure.identities())
    for line in lines:
        if args.format == "json":
            print(json.dumps({"kind": "identity", "identity": line}, sort_keys=True))
        else:
            print(line)
    return EXIT_OK


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hyperq",
        description="Finite-model workbench for identities, quasi-identities, "
        "hypersubstitutions, derived algebras and solidity checking.",
    )
    p.add_argument("--format", choices=("text", "json"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check a theory against an algebra")
    c.add_argument("--algebra", required=True)
    c.add_argument("--theory", required=True)
    c.add_argument("--mode", choices=("id", "qid", "hyper", "hqid"), required=True)
    c.add_argument("--monoid", help="hsub file of monoid generators")
    c.add_argument("--cap", type=int, help="clone-slice cap")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("derive", help="print the derived algebra file")
    d.add_argument("--algebra", required=True)
    d.add_argument("--hsub", required=True)
    d.set_defaults(func=cmd_derive)

    cl = sub.add_parser("clone", help="enumerate term operations of one arity")
    cl.add_argument("--algebra", required=True)
    cl.add_argument("--arity", type=int, required=True)
    cl.add_argument("--cap", type=int)
    cl.set_defaults(func=cmd_clone)

    s = sub.add_parser("solid", help="check a finite family for solidity")
    s.add_argument("--algebra", action="append", required=True)
    s.add_argument("--theory", required=True)
    s.add_argument("--monoid")
    s.add_argument("--cap", type=int)
    s.set_defaults(func=cmd_solid)

    t = sub.add_parser("theorem41", help="per-magma equivalence sweep")
    t.add_argument("--carrier", type=int, required=True)
    t.add_argument("--theory", required=True)
    t.add_argument("--monoid")
    t.add_argument("--sample", type=int)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--cap", type=int)
    t.add_argument("--jobs", type=int, default=1, help="worker processes for the sweep")
    t.set_defaults(func=cmd_theorem41)

    i = sub.add_parser("infer", help="bounded deduction closure of identities")
    i.add_argument("--theory", required=True)
    i.add_argument("--rules", choices=("E", "EH", "EMH"), default="E")
    i.add_argument("--monoid")
    i.add_argument("--max-term-size", type=int, default=7)
    i.add_argument("--max-steps", type=int, default=1_000_000)
    i.add_argument("--image-size", type=int, default=5)
    i.add_argument("--compare", action="store_true", help="compare E, EH (and EMH)")
    i.set_defaults(func=cmd_infer)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except EvalError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
