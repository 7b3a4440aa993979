"""Finite algebras as operation tables: term evaluation, derived algebras,
and enumeration of term operations (clone slices).

Tables are row-major: the table of an arity-m symbol over carrier {0..n-1}
has n**m entries, indexed by the argument tuple read as a base-n number with
the first argument most significant.  The same convention orders environment
spaces and the tables of term operations, so files and reports are bit-exact
reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .hypersubst import Hypersubstitution, canonical_var
from .kernels import pure as _pure
from .syntax import App, ParseError, Signature, Term, Var, variables_of

DEFAULT_CLONE_CAP = 100_000

Environment = dict[str, int]


class EvalError(ValueError):
    """Unbound variable or stray variable during evaluation."""


@dataclass(frozen=True)
class FiniteAlgebra:
    """Carrier {0..carrier_size-1} plus one lookup table per symbol.

    The name is a label only: equality and hashing go by carrier, signature
    and tables, so a derived algebra compares equal to any algebra with the
    same operations.
    """

    name: str = field(compare=False)
    carrier_size: int
    signature: Signature
    tables: tuple[tuple[int, ...], ...]  # aligned with signature.symbols

    def __post_init__(self):
        n = self.carrier_size
        if n < 1:
            raise ValueError("carrier must have at least one element")
        if len(self.tables) != len(self.signature.symbols):
            raise ValueError("one table per signature symbol required")
        for (sym, arity), table in zip(self.signature.symbols, self.tables):
            if len(table) != n**arity:
                raise ValueError(
                    f"table for {sym!r} has {len(table)} entries, expected {n**arity}"
                )
            if any(not (0 <= v < n) for v in table):
                raise ValueError(f"table for {sym!r} has entries outside 0..{n - 1}")

    def table(self, symbol: str) -> tuple[int, ...]:
        for (sym, _), table in zip(self.signature.symbols, self.tables):
            if sym == symbol:
                return table
        raise KeyError(symbol)

    def np_tables(self) -> list[np.ndarray]:
        return [np.array(t, dtype=np.uint8) for t in self.tables]

    def arities(self) -> list[int]:
        return [arity for _, arity in self.signature.symbols]

    def apply(self, symbol: str, *args: int) -> int:
        idx = 0
        for a in args:
            idx = idx * self.carrier_size + a
        return self.table(symbol)[idx]


@dataclass(frozen=True)
class TermOperation:
    """A tabulated n-ary operation together with a term inducing it."""

    arity: int
    table: tuple[int, ...]
    witness: Term


@dataclass(frozen=True)
class CloneSlice:
    """All term operations of one arity, when complete."""

    arity: int
    ops: tuple[TermOperation, ...]
    complete: bool


# --------------------------------------------------------------------------
# Term compilation and evaluation
# --------------------------------------------------------------------------

def compile_term(t: Term, var_order: list[str], sig: Signature) -> np.ndarray:
    """Post-order opcode array: -1-i for variable i, symbol index otherwise."""
    sym_index = {name: i for i, (name, _) in enumerate(sig.symbols)}
    var_index = {v: i for i, v in enumerate(var_order)}
    out: list[int] = []

    def walk(node: Term) -> None:
        if isinstance(node, Var):
            try:
                out.append(-1 - var_index[node.name])
            except KeyError:
                raise EvalError(f"variable {node.name!r} not bound") from None
        else:
            for a in node.args:
                walk(a)
            out.append(sym_index[node.symbol])

    walk(t)
    return np.array(out, dtype=np.int32)


def eval_term(A: FiniteAlgebra, t: Term, env: Environment) -> int:
    """Bottom-up evaluation of one term at one environment."""
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise EvalError(f"unbound variable {t.name!r}") from None
    args = [eval_term(A, a, env) for a in t.args]
    idx = 0
    for a in args:
        idx = idx * A.carrier_size + a
    return A.table(t.symbol)[idx]


def eval_term_table(A: FiniteAlgebra, t: Term, var_order: list[str]) -> np.ndarray:
    """Values of t at every environment over var_order (lexicographic)."""
    code = compile_term(t, var_order, A.signature)
    n, k = A.carrier_size, len(var_order)
    var_tables = _pure.env_var_tables(n, k)
    return _pure.eval_code(
        code, var_tables, A.np_tables(), np.array(A.arities(), dtype=np.int32), n
    )


def term_operation(A: FiniteAlgebra, t: Term, n_args: int) -> TermOperation:
    """Tabulate the operation t induces over canonical variables x1..x{n_args}."""
    allowed = {f"x{i}" for i in range(1, n_args + 1)}
    stray = [v for v in variables_of(t) if v not in allowed]
    if stray:
        raise EvalError(f"term uses variables outside x1..x{n_args}: {stray}")
    var_order = [f"x{i}" for i in range(1, n_args + 1)]
    table = eval_term_table(A, t, var_order)
    return TermOperation(n_args, tuple(int(v) for v in table), t)


# --------------------------------------------------------------------------
# Clone-slice enumeration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RawSlice:
    """Kernel-level slice: tables plus definition rows.

    defs row [-1, j, ...] is the j-th projection; [sym, p1..pm, ...] applies
    fundamental symbol sym to earlier ops p1..pm.  Order is deterministic:
    ascending witness size, then symbol order, then argument enumeration with
    per-size pools sorted by witness print string.
    """

    arity: int
    tables: np.ndarray  # uint8 [N, n**arity]
    defs: np.ndarray  # int32 [N, 1+max_arity]
    complete: bool

    def __len__(self) -> int:
        return int(self.tables.shape[0])

    def witness(self, i: int, sig: Signature) -> Term:
        return _witness_terms(self.defs, sig)[i]

    def witnesses(self, sig: Signature) -> list[Term]:
        return _witness_terms(self.defs, sig)


def _witness_terms(defs: np.ndarray, sig: Signature) -> list[Term]:
    names = sig.names()
    arities = [a for _, a in sig.symbols]
    out: list[Term] = []
    for i in range(defs.shape[0]):
        row = defs[i]
        if row[0] < 0:
            out.append(canonical_var(int(row[1]) + 1))
        else:
            sym = int(row[0])
            args = tuple(out[int(row[1 + t])] for t in range(arities[sym]))
            out.append(App(names[sym], args))
    return out


def _size_compositions(total: int, parts: int):
    """Positive integer tuples summing to total, first coordinate descending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total - parts + 1, 0, -1):
        for rest in _size_compositions(total - first, parts - 1):
            yield (first, *rest)


def compute_raw_slice(A: FiniteAlgebra, arity: int, cap: int = DEFAULT_CLONE_CAP) -> RawSlice:
    """Fixpoint closure of the projections under composition with the
    fundamental operations, deduplicated by table, via the selected kernel."""
    n = A.carrier_size
    fund_tables = A.np_tables()
    fund_arities = A.arities()
    acc = kernels.CloneAccumulator(n, arity, cap, fund_tables, fund_arities)

    sizes: list[int] = []
    prints: list[str] = []
    class_sorted: dict[int, np.ndarray] = {}

    for j in range(arity):
        acc.add_projection(j)
    new_ids = list(range(len(sizes), acc.count))
    sizes.extend(1 for _ in new_ids)
    prints.extend(f"x{j + 1}" for j in range(len(new_ids)))
    class_sorted[1] = np.array(
        sorted(new_ids, key=lambda i: prints[i]), dtype=np.int32
    )

    names = A.signature.names()
    s = 2
    while not acc.capped and not acc.is_full():
        max_arity = max(fund_arities)
        if s > 1 + max_arity * max(sizes):
            break
        before = acc.count
        for sym, m in ((i, a) for i, (_, a) in enumerate(A.signature.symbols)):
            for split in _size_compositions(s - 1, m):
                pools = [class_sorted.get(sz) for sz in split]
                if any(p is None or len(p) == 0 for p in pools):
                    continue
                acc.compose_batch(sym, pools)
                if acc.capped or acc.is_full():
                    break
            if acc.capped or acc.is_full():
                break
        if acc.count > before:
            defs = acc.defs()
            new_ids = list(range(before, acc.count))
            for i in new_ids:
                row = defs[i]
                sym = int(row[0])
                parents = [int(row[1 + t]) for t in range(fund_arities[sym])]
                sizes.append(1 + sum(sizes[p] for p in parents))
                prints.append(f"{names[sym]}({','.join(prints[p] for p in parents)})")
            by_size: dict[int, list[int]] = {}
            for i in new_ids:
                by_size.setdefault(sizes[i], []).append(i)
            for sz, ids in by_size.items():
                ids.sort(key=lambda i: prints[i])
                class_sorted[sz] = np.array(ids, dtype=np.int32)
        s += 1

    complete = not acc.capped
    return RawSlice(arity, acc.tables(), acc.defs(), complete)


@lru_cache(maxsize=16)
def _cached_raw_slice(A: FiniteAlgebra, arity: int, cap: int) -> RawSlice:
    return compute_raw_slice(A, arity, cap)


def enumerate_term_operations(
    A: FiniteAlgebra, arity: int, cap: int = DEFAULT_CLONE_CAP
) -> CloneSlice:
    """The arity-`arity` term operations of A, with minimal witness terms."""
    if arity < 1:
        raise ValueError("arity must be at least 1")
    raw = _cached_raw_slice(A, arity, cap)
    witnesses = raw.witnesses(A.signature)
    ops = tuple(
        TermOperation(arity, tuple(int(v) for v in raw.tables[i]), witnesses[i])
        for i in range(len(raw))
    )
    return CloneSlice(arity, ops, raw.complete)


# --------------------------------------------------------------------------
# Derived algebras and semantic hypersubstitutions
# --------------------------------------------------------------------------

def derived_algebra(A: FiniteAlgebra, sigma: Hypersubstitution) -> FiniteAlgebra:
    """Same carrier; each symbol interpreted by the table its image induces."""
    if sigma.signature != A.signature:
        raise ValueError("hypersubstitution over a different signature")
    tables = tuple(
        term_operation(A, sigma.image(sym), arity).table
        for sym, arity in A.signature.symbols
    )
    return FiniteAlgebra(A.name, A.carrier_size, A.signature, tables)


@dataclass(frozen=True)
class SemanticChoice:
    """One per-symbol choice of term operations plus its witness."""

    assignment: tuple[tuple[str, TermOperation], ...]
    hsub: Hypersubstitution

    def operation(self, symbol: str) -> TermOperation:
        for sym, op in self.assignment:
            if sym == symbol:
                return op
        raise KeyError(symbol)


@dataclass(frozen=True)
class SemanticHsubs:
    choices: tuple[SemanticChoice, ...]
    complete: bool  # False means the list is a lower bound (clone cap hit)


MAX_SEMANTIC_CHOICES = 1_000_000


def semantic_hsubs(A: FiniteAlgebra, slices: dict[int, CloneSlice]) -> SemanticHsubs:
    """Cartesian product over symbols of the matching-arity slices.

    Each choice carries the hypersubstitution assembled from witness terms,
    so syntactic and semantic quantification stay interchangeable.
    """
    import itertools
    import math

    pools = []
    complete = True
    for sym, arity in A.signature.symbols:
        if arity not in slices:
            raise ValueError(f"no clone slice of arity {arity} supplied for {sym!r}")
        sl = slices[arity]
        complete = complete and sl.complete
        pools.append([(sym, op) for op in sl.ops])
    total = math.prod(len(p) for p in pools)
    if total > MAX_SEMANTIC_CHOICES:
        raise EvalError(
            f"{total} per-symbol operation choices exceed the enumeration limit"
        )
    choices = []
    for combo in itertools.product(*pools):
        hsub = Hypersubstitution(A.signature, tuple(op.witness for _, op in combo))
        choices.append(SemanticChoice(tuple(combo), hsub))
    return SemanticHsubs(tuple(choices), complete)


def slices_for_signature(
    A: FiniteAlgebra, cap: int = DEFAULT_CLONE_CAP
) -> dict[int, CloneSlice]:
    """One clone slice per arity occurring in A's signature."""
    return {
        arity: enumerate_term_operations(A, arity, cap)
        for arity in sorted({a for _, a in A.signature.symbols})
    }


# --------------------------------------------------------------------------
# File format
# --------------------------------------------------------------------------

def parse_algebra(text: str) -> FiniteAlgebra:
    """Parse the flat algebra file format:

        algebra NAME
        carrier N
        op f/2 = [0,0,1,1]
        end
    """
    name = None
    carrier = None
    symbols: list[tuple[str, int]] = []
    tables: list[tuple[int, ...]] = []
    ended = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ended:
            raise ParseError(f"line {lineno}: content after 'end'")
        if name is None:
            m = re.fullmatch(r"algebra\s+([A-Za-z_][A-Za-z0-9_]*)", line)
            if not m:
                raise ParseError(f"line {lineno}: expected 'algebra NAME'")
            name = m.group(1)
        elif carrier is None:
            m = re.fullmatch(r"carrier\s+(\d+)", line)
            if not m:
                raise ParseError(f"line {lineno}: expected 'carrier N'")
            carrier = int(m.group(1))
        elif line == "end":
            ended = True
        else:
            m = re.fullmatch(
                r"op\s+([A-Za-z_][A-Za-z0-9_]*)\s*/\s*(\d+)\s*=\s*\[([0-9,\s]*)\]", line
            )
            if not m:
                raise ParseError(f"line {lineno}: expected 'op NAME/ARITY = [..]'")
            sym, arity = m.group(1), int(m.group(2))
            entries = tuple(int(v) for v in m.group(3).replace(" ", "").split(",") if v)
            symbols.append((sym, arity))
            tables.append(entries)
    if name is None or carrier is None:
        raise ParseError("algebra file missing header")
    if not ended:
        raise ParseError("algebra file missing 'end'")
    try:
        sig = Signature(tuple(symbols))
        return FiniteAlgebra(name, carrier, sig, tuple(tables))
    except ValueError as e:
        raise ParseError(str(e)) from None


def print_algebra(A: FiniteAlgebra) -> str:
    lines = [f"algebra {A.name}", f"carrier {A.carrier_size}"]
    for (sym, arity), table in zip(A.signature.symbols, A.tables):
        lines.append(f"op {sym}/{arity} = [{','.join(map(str, table))}]")
    lines.append("end")
    return "\n".join(lines) + "\n"


def load_algebra(path) -> FiniteAlgebra:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read())
