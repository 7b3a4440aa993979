"""Signatures, terms, equations, quasi-identities, theories and their text DSL.

Grammar (whitespace-insensitive within lines):

    signature:      "sig" (NAME "/" ARITY)+
    term:           NAME | NAME "(" term ("," term)* ")"
    equation:       term "=" term
    quasi-identity: equation ("&" equation)* "->" equation   | equation
    theory file:    first non-comment line is a signature, every further
                    non-empty non-"#" line is a quasi-identity

Identifiers that are declared in the signature are operation symbols,
everything else is a variable.  Application is prefix only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class ParseError(ValueError):
    """Raised on any malformed DSL input."""


# --------------------------------------------------------------------------
# Domain types
# --------------------------------------------------------------------------

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Signature:
    """Ordered operation symbols with arities; names unique, arities >= 1."""

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        seen = set()
        for name, arity in self.symbols:
            if not _NAME_RE.fullmatch(name):
                raise ParseError(f"bad symbol name {name!r}")
            if name in seen:
                raise ParseError(f"duplicate symbol {name!r}")
            if arity < 1:
                raise ParseError(f"symbol {name!r} has arity {arity}; nullary symbols are not supported")
            seen.add(name)

    def arity(self, name: str) -> int:
        for sym, ar in self.symbols:
            if sym == name:
                return ar
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(sym == name for sym, _ in self.symbols)

    def names(self) -> tuple[str, ...]:
        return tuple(sym for sym, _ in self.symbols)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple["Term", ...]

    def __str__(self) -> str:
        return f"{self.symbol}({','.join(map(str, self.args))})"


Term = Var | App


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"

    def reversed(self) -> "Equation":
        return Equation(self.rhs, self.lhs)


@dataclass(frozen=True)
class QuasiIdentity:
    """Horn implication: premises (possibly none) entail a conclusion."""

    premises: tuple[Equation, ...]
    conclusion: Equation

    def __str__(self) -> str:
        if not self.premises:
            return str(self.conclusion)
        return " & ".join(map(str, self.premises)) + f" -> {self.conclusion}"

    @property
    def is_identity(self) -> bool:
        return not self.premises

    def equations(self) -> tuple[Equation, ...]:
        return self.premises + (self.conclusion,)


@dataclass(frozen=True)
class Theory:
    signature: Signature
    axioms: tuple[QuasiIdentity, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for ax in self.axioms:
            for eq in ax.equations():
                validate_term(eq.lhs, self.signature)
                validate_term(eq.rhs, self.signature)

    def __str__(self) -> str:
        lines = [print_signature(self.signature)]
        lines.extend(str(ax) for ax in self.axioms)
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Term utilities
# --------------------------------------------------------------------------

def variables_of(t: Term) -> list[str]:
    """Variable names in first-occurrence (left-to-right) order."""
    out: list[str] = []
    seen: set[str] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            if node.name not in seen:
                seen.add(node.name)
                out.append(node.name)
        else:
            stack.extend(reversed(node.args))
    return out


def variables_of_quasi_identity(q: QuasiIdentity) -> list[str]:
    """First-occurrence order across premises then conclusion."""
    out: list[str] = []
    seen: set[str] = set()
    for eq in q.equations():
        for side in (eq.lhs, eq.rhs):
            for v in variables_of(side):
                if v not in seen:
                    seen.add(v)
                    out.append(v)
    return out


def term_size(t: Term) -> int:
    """Node count (variables and applications both count as one node)."""
    total = 0
    stack = [t]
    while stack:
        node = stack.pop()
        total += 1
        if isinstance(node, App):
            stack.extend(node.args)
    return total


def substitute_vars(t: Term, mapping: dict[str, Term]) -> Term:
    """Simultaneous substitution; variables outside the mapping stay fixed."""
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    return App(t.symbol, tuple(substitute_vars(a, mapping) for a in t.args))


def validate_term(t: Term, sig: Signature) -> None:
    """Check every application node against the signature."""
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, App):
            if node.symbol not in sig:
                raise ParseError(f"symbol {node.symbol!r} not declared")
            if len(node.args) != sig.arity(node.symbol):
                raise ParseError(
                    f"symbol {node.symbol!r} expects {sig.arity(node.symbol)} "
                    f"arguments, got {len(node.args)}"
                )
            stack.extend(node.args)


# --------------------------------------------------------------------------
# Parsers
# --------------------------------------------------------------------------

def parse_signature(text: str) -> Signature:
    toks = text.split()
    if not toks or toks[0] != "sig":
        raise ParseError("signature must start with 'sig'")
    if len(toks) == 1:
        raise ParseError("empty signature")
    symbols = []
    for tok in toks[1:]:
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)/(\d+)", tok)
        if not m:
            raise ParseError(f"malformed symbol declaration {tok!r}")
        symbols.append((m.group(1), int(m.group(2))))
    return Signature(tuple(symbols))


class _TermParser:
    def __init__(self, text: str, sig: Signature):
        self.text = text
        self.pos = 0
        self.sig = sig

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise ParseError(f"expected {ch!r} at position {self.pos} in {self.text!r}")
        self.pos += 1

    def name(self) -> str:
        self.skip_ws()
        m = _NAME_RE.match(self.text, self.pos)
        if not m:
            raise ParseError(f"expected identifier at position {self.pos} in {self.text!r}")
        self.pos = m.end()
        return m.group(0)

    def term(self) -> Term:
        name = self.name()
        if self.peek() != "(":
            if name in self.sig:
                raise ParseError(f"operation symbol {name!r} used without arguments")
            return Var(name)
        if name not in self.sig:
            raise ParseError(f"undeclared symbol {name!r} applied to arguments")
        self.expect("(")
        args = [self.term()]
        while self.peek() == ",":
            self.expect(",")
            args.append(self.term())
        self.expect(")")
        arity = self.sig.arity(name)
        if len(args) != arity:
            raise ParseError(f"symbol {name!r} expects {arity} arguments, got {len(args)}")
        return App(name, tuple(args))


def parse_term(text: str, sig: Signature) -> Term:
    if not text.strip():
        raise ParseError("empty term")
    p = _TermParser(text, sig)
    t = p.term()
    p.skip_ws()
    if p.pos != len(text):
        raise ParseError(f"trailing input {text[p.pos:]!r}")
    return t


def _parse_equation(text: str, sig: Signature) -> Equation:
    parts = text.split("=")
    if len(parts) != 2:
        raise ParseError(f"equation needs exactly one '=': {text!r}")
    return Equation(parse_term(parts[0], sig), parse_term(parts[1], sig))


def parse_quasi_identity(text: str, sig: Signature) -> QuasiIdentity:
    if "->" in text:
        body, _, concl = text.rpartition("->")
        premises = tuple(_parse_equation(p, sig) for p in body.split("&"))
        return QuasiIdentity(premises, _parse_equation(concl, sig))
    return QuasiIdentity((), _parse_equation(text, sig))


def parse_theory(text: str) -> Theory:
    sig = None
    axioms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if sig is None:
                sig = parse_signature(line)
            else:
                axioms.append(parse_quasi_identity(line, sig))
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e}") from None
    if sig is None:
        raise ParseError("theory file has no signature line")
    return Theory(sig, tuple(axioms))


def load_theory(path) -> Theory:
    with open(path, encoding="utf-8") as fh:
        return parse_theory(fh.read())


# --------------------------------------------------------------------------
# Printers (inverses of the parsers, tested by round-trip)
# --------------------------------------------------------------------------

def print_signature(sig: Signature) -> str:
    return "sig " + " ".join(f"{name}/{arity}" for name, arity in sig.symbols)


def print_term(t: Term) -> str:
    return str(t)


def print_quasi_identity(q: QuasiIdentity) -> str:
    return str(q)


def print_theory(t: Theory) -> str:
    return str(t)
