"""Closure of a finite family under derived algebras, and the per-algebra
equivalence harness: a family's axioms hold as hyper-quasi-identities exactly
when every derived algebra still satisfies the axioms.

Both sides of the equivalence are computed through different routes on
purpose.  The left side transforms the axioms syntactically and checks them
in the base algebra; the right side re-tabulates the operations and checks
the untouched axioms in each derived algebra.  Their agreement over sweeps
is the artifact's central check.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import kernels
from .algebra import (
    DEFAULT_CLONE_CAP,
    FiniteAlgebra,
    _cached_raw_slice,
    compile_term,
    derived_algebra,
    semantic_hsubs,
    slices_for_signature,
)
from .hypersubst import HsubMonoid, Hypersubstitution
from .satisfaction import check_theory
from .syntax import Signature, Theory, variables_of_quasi_identity


# --------------------------------------------------------------------------
# Derived-algebra enumeration
# --------------------------------------------------------------------------

def enumerate_derived_algebras_with_witnesses(
    A: FiniteAlgebra,
    M: HsubMonoid | None = None,
    cap: int = DEFAULT_CLONE_CAP,
) -> tuple[list[tuple[FiniteAlgebra, Hypersubstitution]], bool]:
    """Deduplicated derived algebras, each with one witnessing
    hypersubstitution; second component is False if the clone cap was hit."""
    seen: dict[tuple, int] = {}
    out: list[tuple[FiniteAlgebra, Hypersubstitution]] = []
    complete = True
    if M is not None:
        if M.signature != A.signature:
            raise ValueError("monoid over a different signature")
        candidates = [(derived_algebra(A, s), s) for s in M.elements]
    else:
        sem = semantic_hsubs(A, slices_for_signature(A, cap))
        complete = sem.complete
        candidates = []
        for choice in sem.choices:
            tables = tuple(op.table for _, op in choice.assignment)
            B = FiniteAlgebra(A.name, A.carrier_size, A.signature, tables)
            candidates.append((B, choice.hsub))
    for B, sigma in candidates:
        key = B.tables
        if key not in seen:
            seen[key] = len(out)
            out.append((B, sigma))
    return out, complete


def enumerate_derived_algebras(
    A: FiniteAlgebra,
    M: HsubMonoid | None = None,
    cap: int = DEFAULT_CLONE_CAP,
) -> list[FiniteAlgebra]:
    pairs, _ = enumerate_derived_algebras_with_witnesses(A, M, cap)
    return [B for B, _ in pairs]


# --------------------------------------------------------------------------
# Solidity of a finite family
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SolidityEntry:
    algebra: FiniteAlgebra
    in_family: bool  # satisfies the axioms plainly
    derived_total: int
    derived_failures: tuple[tuple[Hypersubstitution, int], ...]  # (witness, axiom idx)

    @property
    def all_derived_ok(self) -> bool:
        return not self.derived_failures


@dataclass(frozen=True)
class SolidityReport:
    entries: tuple[SolidityEntry, ...]
    solid: bool
    conclusive: bool


def check_solid(
    algebras: list[FiniteAlgebra],
    T: Theory,
    M: HsubMonoid | None = None,
    cap: int = DEFAULT_CLONE_CAP,
) -> SolidityReport:
    """Solid: every derived algebra of every axiom-satisfying member again
    satisfies the axioms.  Non-members are reported but do not count."""
    entries: list[SolidityEntry] = []
    solid = True
    conclusive = True
    for A in algebras:
        in_family = check_theory(A, T, "plain").holds
        failures: list[tuple[Hypersubstitution, int]] = []
        total = 0
        if in_family:
            derived, complete = enumerate_derived_algebras_with_witnesses(A, M, cap)
            conclusive = conclusive and complete
            total = len(derived)
            for B, sigma in derived:
                rep = check_theory(B, T, "plain")
                if not rep.holds:
                    idx = next(i for i, v in enumerate(rep.verdicts) if not v.holds)
                    failures.append((sigma, idx))
            solid = solid and not failures
        entries.append(SolidityEntry(A, in_family, total, tuple(failures)))
    return SolidityReport(tuple(entries), solid, conclusive)


# --------------------------------------------------------------------------
# Per-algebra equivalence harness
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TheoremEntry:
    algebra_id: str
    skipped: bool  # algebra does not satisfy the axioms plainly
    lhs: bool | None  # axioms hyper-quasi-satisfied (syntactic route)
    rhs: bool | None  # every derived algebra satisfies the axioms (semantic route)
    conclusive: bool

    @property
    def agree(self) -> bool:
        return self.skipped or self.lhs == self.rhs


@dataclass(frozen=True)
class TheoremReport:
    entries: tuple[TheoremEntry, ...]
    agree_count: int
    total: int

    @property
    def all_agree(self) -> bool:
        return self.agree_count == self.total


def _rhs_all_derived_satisfy(A: FiniteAlgebra, T: Theory, cap: int) -> tuple[bool, bool]:
    """(every derived algebra satisfies T, conclusive).  Fast path for
    one-symbol signatures: the slice tables *are* the derived tables."""
    if len(A.signature.symbols) == 1 and all(len(ax.premises) <= 30 for ax in T.axioms):
        (_, arity), = A.signature.symbols
        raw = _cached_raw_slice(A, arity, cap)
        n = A.carrier_size
        for ax in T.axioms:
            var_order = variables_of_quasi_identity(ax)
            prem_l = [compile_term(p.lhs, var_order, A.signature) for p in ax.premises]
            prem_r = [compile_term(p.rhs, var_order, A.signature) for p in ax.premises]
            c, _ = kernels.rhs_scan_axiom(
                raw.tables,
                arity,
                n,
                len(var_order),
                prem_l,
                prem_r,
                compile_term(ax.conclusion.lhs, var_order, A.signature),
                compile_term(ax.conclusion.rhs, var_order, A.signature),
            )
            if c >= 0:
                return False, True
        return True, raw.complete
    derived, complete = enumerate_derived_algebras_with_witnesses(A, None, cap)
    for B, _ in derived:
        if not check_theory(B, T, "plain").holds:
            return False, True
    return True, complete


def verify_theorem_4_1(
    A: FiniteAlgebra,
    T: Theory,
    M: HsubMonoid | None = None,
    cap: int = DEFAULT_CLONE_CAP,
    algebra_id: str | None = None,
) -> TheoremEntry:
    """One equivalence instance: hyper-quasi-satisfaction of the axioms vs
    satisfaction in every derived algebra.  Algebras that do not satisfy the
    axioms plainly are reported as skipped."""
    ident = algebra_id if algebra_id is not None else A.name
    if not check_theory(A, T, "plain").holds:
        return TheoremEntry(ident, True, None, None, True)
    hyper = check_theory(A, T, "hyper", M, cap)
    lhs = hyper.holds
    if M is not None:
        derived, complete = enumerate_derived_algebras_with_witnesses(A, M, cap)
        rhs = all(check_theory(B, T, "plain").holds for B, _ in derived)
        conclusive = complete
    else:
        rhs, rhs_conclusive = _rhs_all_derived_satisfy(A, T, cap)
        conclusive = hyper.conclusive and rhs_conclusive
    return TheoremEntry(ident, False, lhs, rhs, conclusive)


# --------------------------------------------------------------------------
# Magma sweeps (single binary symbol)
# --------------------------------------------------------------------------

def magma_from_id(table_id: int, n: int, sig: Signature) -> FiniteAlgebra:
    """Decode a base-n table id (row-major digits, most significant first)."""
    cells = n * n
    digits = []
    rem = table_id
    for _ in range(cells):
        digits.append(rem % n)
        rem //= n
    digits.reverse()
    return FiniteAlgebra(f"m{table_id}", n, sig, (tuple(digits),))


def magma_ids(n: int, sample: int | None, seed: int) -> list[int]:
    total = n ** (n * n)
    if sample is None:
        return list(range(total))
    rng = random.Random(seed)
    if sample >= total:
        return list(range(total))
    chosen: set[int] = set()
    while len(chosen) < sample:
        chosen.add(rng.randrange(total))
    return sorted(chosen)


def _sweep_one(args: tuple) -> TheoremEntry:
    tid, carrier, T, M, cap = args
    A = magma_from_id(tid, carrier, T.signature)
    return verify_theorem_4_1(A, T, M, cap, algebra_id=str(tid))


def sweep_theorem(
    carrier: int,
    T: Theory,
    M: HsubMonoid | None = None,
    sample: int | None = None,
    seed: int = 0,
    cap: int = DEFAULT_CLONE_CAP,
    jobs: int = 1,
) -> TheoremReport:
    """Run the equivalence over every (or a seeded sample of) magma tables
    on the given carrier.  The theory must use one binary symbol.  Each
    magma is independent, so jobs > 1 fans the sweep out over processes;
    results are identical either way."""
    if len(T.signature.symbols) != 1 or T.signature.symbols[0][1] != 2:
        raise ValueError("sweep requires a signature with one binary symbol")
    if carrier > 3 and sample is None:
        raise ValueError("carriers above 3 require sampling")
    ids = magma_ids(carrier, sample, seed)
    work = [(tid, carrier, T, M, cap) for tid in ids]
    if jobs > 1 and len(work) > 1:
        import multiprocessing

        with multiprocessing.Pool(jobs) as pool:
            entries = pool.map(_sweep_one, work, chunksize=max(1, len(work) // (4 * jobs)))
    else:
        entries = [_sweep_one(w) for w in work]
    agree = sum(1 for e in entries if e.agree)
    return TheoremReport(tuple(entries), agree, len(entries))


def format_theorem_report(report: TheoremReport) -> str:
    lines = []
    for e in report.entries:
        if e.skipped:
            lines.append(f"{e.algebra_id} skipped")
        else:
            lines.append(
                f"{e.algebra_id} lhs={str(e.lhs).lower()} rhs={str(e.rhs).lower()} "
                f"agree={str(e.agree).lower()}"
            )
    lines.append(f"agree {report.agree_count}/{report.total}")
    return "\n".join(lines) + "\n"
