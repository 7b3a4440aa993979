"""Decision procedures for the five satisfaction relations: plain identity,
plain quasi-identity, hyperidentity, hyper-quasi-identity, and the variants
restricted to a monoid of hypersubstitutions.

Quantification over hypersubstitutions is finite because two images inducing
the same term operations yield the same induced checks; without an explicit
monoid the checkers therefore range over per-symbol clone-slice choices,
each applied *syntactically* through its witness term.  Counterexamples are
deterministic: lexicographically least environment, then least
hypersubstitution in enumeration order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .algebra import (
    DEFAULT_CLONE_CAP,
    Environment,
    EvalError,
    FiniteAlgebra,
    _cached_raw_slice,
    compile_term,
    semantic_hsubs,
    slices_for_signature,
)
from .hypersubst import (
    HsubMonoid,
    Hypersubstitution,
    apply_hsub_quasi_identity,
)
from .kernels import pure as _pure
from .syntax import (
    Equation,
    QuasiIdentity,
    Theory,
    variables_of_quasi_identity,
)


# largest environment space an exhaustive check will materialize
MAX_ENV_SPACE = 1 << 24


def _guard_env_space(n: int, k: int) -> None:
    if n**k > MAX_ENV_SPACE:
        raise EvalError(
            f"environment space {n}**{k} exceeds the exhaustive-check limit"
        )


@dataclass(frozen=True)
class Counterexample:
    env: Environment
    lhs_value: int
    rhs_value: int


@dataclass(frozen=True)
class Verdict:
    holds: bool
    counterexample: Counterexample | None = None


@dataclass(frozen=True)
class HyperCounterexample:
    hsub: Hypersubstitution
    env: Environment
    induced: QuasiIdentity


@dataclass(frozen=True)
class HyperVerdict:
    holds: bool
    counterexample: HyperCounterexample | None = None
    conclusive: bool = True  # False: clone cap hit, "holds" is a lower bound


# --------------------------------------------------------------------------
# Plain checks
# --------------------------------------------------------------------------

def _env_from_index(var_order: list[str], n: int, idx: int) -> Environment:
    vals = []
    for _ in var_order:
        vals.append(idx % n)
        idx //= n
    return dict(zip(var_order, reversed(vals)))


def check_quasi_identity(A: FiniteAlgebra, q: QuasiIdentity) -> Verdict:
    """Exhaustive over all environments of the shared variable tuple: wherever
    every premise holds, the conclusion must too."""
    var_order = variables_of_quasi_identity(q)
    n, k = A.carrier_size, len(var_order)
    _guard_env_space(n, k)
    var_tables = _pure.env_var_tables(n, k)
    tables = A.np_tables()
    arities = np.array(A.arities(), dtype=np.int32)

    def tab(term) -> np.ndarray:
        return _pure.eval_code(
            compile_term(term, var_order, A.signature), var_tables, tables, arities, n
        )

    ok = np.ones(n**k, dtype=bool)
    for prem in q.premises:
        ok &= tab(prem.lhs) == tab(prem.rhs)
        if not ok.any():
            return Verdict(True)
    lv, rv = tab(q.conclusion.lhs), tab(q.conclusion.rhs)
    bad = ok & (lv != rv)
    if not bad.any():
        return Verdict(True)
    e = int(np.argmax(bad))
    return Verdict(
        False,
        Counterexample(_env_from_index(var_order, n, e), int(lv[e]), int(rv[e])),
    )


def check_identity(A: FiniteAlgebra, e: Equation) -> Verdict:
    return check_quasi_identity(A, QuasiIdentity((), e))


# --------------------------------------------------------------------------
# Hyper checks
# --------------------------------------------------------------------------

def _scan_kernel(A: FiniteAlgebra, q: QuasiIdentity, cap: int):
    """Single-symbol fast path: scan slice images via the kernel.

    Returns (sigma_index, env_index, raw_slice); indices are -1 when no
    violation was found.
    """
    var_order = variables_of_quasi_identity(q)
    n, k = A.carrier_size, len(var_order)
    _guard_env_space(n, k)
    (_, arity), = A.signature.symbols
    raw = _cached_raw_slice(A, arity, cap)
    prem_l = [compile_term(p.lhs, var_order, A.signature) for p in q.premises]
    prem_r = [compile_term(p.rhs, var_order, A.signature) for p in q.premises]
    concl_l = compile_term(q.conclusion.lhs, var_order, A.signature)
    concl_r = compile_term(q.conclusion.rhs, var_order, A.signature)
    s, e = kernels.lhs_scan_axiom(
        A.np_tables(),
        np.array(A.arities(), dtype=np.int32),
        n,
        k,
        raw.defs,
        prem_l,
        prem_r,
        concl_l,
        concl_r,
    )
    return s, e, raw, var_order


def _hyper_counterexample(
    A: FiniteAlgebra, q: QuasiIdentity, sigma: Hypersubstitution
) -> HyperCounterexample:
    induced = apply_hsub_quasi_identity(sigma, q)
    inner = check_quasi_identity(A, induced)
    assert inner.counterexample is not None
    return HyperCounterexample(sigma, inner.counterexample.env, induced)


def check_hyper_quasi_identity(
    A: FiniteAlgebra,
    q: QuasiIdentity,
    M: HsubMonoid | None = None,
    cap: int = DEFAULT_CLONE_CAP,
) -> HyperVerdict:
    """All hypersubstitutions in scope, applied uniformly to every premise and
    the conclusion, must leave the implication valid.

    With M given the scope is exactly M's elements; otherwise it is every
    choice of term operations for the symbols (witnessed syntactically).
    """
    if M is not None:
        if M.signature != A.signature:
            raise ValueError("monoid over a different signature")
        for sigma in M.elements:
            induced = apply_hsub_quasi_identity(sigma, q)
            inner = check_quasi_identity(A, induced)
            if not inner.holds:
                assert inner.counterexample is not None
                return HyperVerdict(
                    False,
                    HyperCounterexample(sigma, inner.counterexample.env, induced),
                )
        return HyperVerdict(True)

    # kernel scan handles one-symbol signatures; its code table holds at
    # most 30 premises, beyond which the generic product path takes over
    if len(A.signature.symbols) == 1 and len(q.premises) <= 30:
        s, _, raw, _ = _scan_kernel(A, q, cap)
        if s >= 0:
            sigma = Hypersubstitution(A.signature, (raw.witness(int(s), A.signature),))
            return HyperVerdict(False, _hyper_counterexample(A, q, sigma))
        return HyperVerdict(True, conclusive=raw.complete)

    sem = semantic_hsubs(A, slices_for_signature(A, cap))
    for choice in sem.choices:
        sigma = choice.hsub
        induced = apply_hsub_quasi_identity(sigma, q)
        inner = check_quasi_identity(A, induced)
        if not inner.holds:
            assert inner.counterexample is not None
            return HyperVerdict(
                False, HyperCounterexample(sigma, inner.counterexample.env, induced)
            )
    return HyperVerdict(True, conclusive=sem.complete)


def check_hyperidentity(
    A: FiniteAlgebra,
    e: Equation,
    M: HsubMonoid | None = None,
    cap: int = DEFAULT_CLONE_CAP,
) -> HyperVerdict:
    return check_hyper_quasi_identity(A, QuasiIdentity((), e), M, cap)


# --------------------------------------------------------------------------
# Theory-level reports
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TheoryReport:
    mode: str  # "plain" | "hyper"
    verdicts: tuple[Verdict | HyperVerdict, ...]
    holds: bool
    conclusive: bool


def check_theory(
    A: FiniteAlgebra,
    T: Theory,
    mode: str = "plain",
    M: HsubMonoid | None = None,
    cap: int = DEFAULT_CLONE_CAP,
) -> TheoryReport:
    if T.signature != A.signature:
        raise ValueError("theory and algebra signatures differ")
    if mode not in ("plain", "hyper"):
        raise ValueError(f"unknown mode {mode!r}")
    verdicts: list[Verdict | HyperVerdict] = []
    conclusive = True
    for ax in T.axioms:
        if mode == "plain":
            verdicts.append(check_quasi_identity(A, ax))
        else:
            v = check_hyper_quasi_identity(A, ax, M, cap)
            conclusive = conclusive and (v.conclusive or not v.holds)
            verdicts.append(v)
    holds = all(v.holds for v in verdicts)
    return TheoryReport(mode, tuple(verdicts), holds, conclusive)
