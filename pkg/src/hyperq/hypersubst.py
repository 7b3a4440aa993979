"""Hypersubstitutions: symbol-to-term maps, their action on terms, composition,
and finitely generated monoids of them.

A hypersubstitution assigns every operation symbol f of arity n a term over
the canonical variables x1..xn.  It acts on terms by fixing variables and
rewriting every application through the assigned image.  Composition is
"apply the right operand first", so that acting with compose(s1, s2) equals
acting with s2 and then s1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    App,
    Equation,
    ParseError,
    QuasiIdentity,
    Signature,
    Term,
    Var,
    parse_term,
    substitute_vars,
    term_size,
    variables_of,
)

_CANONICAL_RE = re.compile(r"x([1-9][0-9]*)")

DEFAULT_MAX_ELEMENTS = 10_000
DEFAULT_MAX_IMAGE_SIZE = 15


def canonical_var(i: int) -> Var:
    """The i-th canonical variable (1-based): x1, x2, ..."""
    return Var(f"x{i}")


def canonical_vars(n: int) -> tuple[Var, ...]:
    return tuple(canonical_var(i) for i in range(1, n + 1))


@dataclass(frozen=True)
class Hypersubstitution:
    """One image term per signature symbol, over canonical variables.

    Images may ignore some canonical variables (projections are allowed),
    but may not mention x_i with i beyond the symbol's arity.
    """

    signature: Signature
    images: tuple[Term, ...]  # aligned with signature.symbols

    def __post_init__(self):
        if len(self.images) != len(self.signature.symbols):
            raise ValueError("one image per signature symbol required")
        for (name, arity), img in zip(self.signature.symbols, self.images):
            for v in variables_of(img):
                m = _CANONICAL_RE.fullmatch(v)
                if not m or int(m.group(1)) > arity:
                    raise ValueError(
                        f"image of {name!r} uses {v!r}; only x1..x{arity} are allowed"
                    )

    def image(self, symbol: str) -> Term:
        for (name, _), img in zip(self.signature.symbols, self.images):
            if name == symbol:
                return img
        raise KeyError(symbol)

    def is_identity(self) -> bool:
        return self == identity_hsub(self.signature)

    def max_image_size(self) -> int:
        return max(term_size(img) for img in self.images)

    def __str__(self) -> str:
        return "; ".join(
            f"{name} -> {img}" for (name, _), img in zip(self.signature.symbols, self.images)
        )


def identity_hsub(sig: Signature) -> Hypersubstitution:
    """Maps every symbol f of arity n to f(x1,...,xn)."""
    images = tuple(App(name, canonical_vars(arity)) for name, arity in sig.symbols)
    return Hypersubstitution(sig, images)


def apply_hsub(sigma: Hypersubstitution, t: Term) -> Term:
    """Act on a term: variables stay fixed, applications go through the image.

    An application f(p1,...,pn) becomes the image of f with its canonical
    variables simultaneously replaced by the transformed arguments.
    """
    if isinstance(t, Var):
        return t
    new_args = [apply_hsub(sigma, a) for a in t.args]
    mapping = {f"x{i}": arg for i, arg in enumerate(new_args, start=1)}
    return substitute_vars(sigma.image(t.symbol), mapping)


def compose(s1: Hypersubstitution, s2: Hypersubstitution) -> Hypersubstitution:
    """compose(s1, s2) acts like s2 first, then s1: its image of f is s1
    applied to s2's image of f."""
    if s1.signature != s2.signature:
        raise ValueError("hypersubstitutions over different signatures")
    images = tuple(apply_hsub(s1, img) for img in s2.images)
    return Hypersubstitution(s1.signature, images)


def apply_hsub_equation(sigma: Hypersubstitution, eq: Equation) -> Equation:
    return Equation(apply_hsub(sigma, eq.lhs), apply_hsub(sigma, eq.rhs))


def apply_hsub_quasi_identity(sigma: Hypersubstitution, q: QuasiIdentity) -> QuasiIdentity:
    """Act uniformly on every premise and the conclusion."""
    return QuasiIdentity(
        tuple(apply_hsub_equation(sigma, p) for p in q.premises),
        apply_hsub_equation(sigma, q.conclusion),
    )


@dataclass(frozen=True)
class HsubMonoid:
    """Closure of a generator set under composition, up to a budget.

    Always contains the identity hypersubstitution.  `saturated` records
    whether the closure completed: it is False when either the element
    budget was hit or some composite was discarded for exceeding the
    image-size budget.
    """

    signature: Signature
    generators: tuple[Hypersubstitution, ...]
    elements: tuple[Hypersubstitution, ...]
    saturated: bool

    def __contains__(self, sigma: Hypersubstitution) -> bool:
        return sigma in self.elements

    def __len__(self) -> int:
        return len(self.elements)

    def is_trivial(self) -> bool:
        return len(self.elements) == 1


def trivial_monoid(sig: Signature) -> HsubMonoid:
    ident = identity_hsub(sig)
    return HsubMonoid(sig, (), (ident,), True)


def generate_monoid(
    gens: list[Hypersubstitution] | tuple[Hypersubstitution, ...],
    max_elements: int = DEFAULT_MAX_ELEMENTS,
    max_image_size: int = DEFAULT_MAX_IMAGE_SIZE,
) -> HsubMonoid:
    """Breadth-first closure of {identity} + gens under composition.

    Elements are deduplicated by structural equality of their images and
    kept in discovery order, so results are deterministic.  Composites
    whose largest image exceeds max_image_size are discarded (and the
    result marked unsaturated); breadth-first order means truncation keeps
    the smallest images.
    """
    if not gens:
        sig = None
    else:
        sig = gens[0].signature
        if any(g.signature != sig for g in gens):
            raise ValueError("generators over different signatures")
    if sig is None:
        raise ValueError("generate_monoid needs at least one generator; "
                         "use trivial_monoid(sig) for the empty case")

    ident = identity_hsub(sig)
    elements: list[Hypersubstitution] = [ident]
    index = {ident}
    saturated = True
    for g in gens:
        if g.max_image_size() > max_image_size:
            saturated = False
        elif g not in index:
            elements.append(g)
            index.add(g)

    frontier = list(elements)
    truncated = False
    while frontier and not truncated:
        new: list[Hypersubstitution] = []
        known_before = list(elements)
        for a in frontier:
            for b in known_before:
                for prod in (compose(a, b), compose(b, a)):
                    if prod in index:
                        continue
                    if prod.max_image_size() > max_image_size:
                        saturated = False
                        continue
                    if len(elements) + len(new) >= max_elements:
                        saturated = False
                        truncated = True
                        break
                    index.add(prod)
                    new.append(prod)
                if truncated:
                    break
            if truncated:
                break
        elements.extend(new)
        frontier = new

    return HsubMonoid(sig, tuple(gens), tuple(elements), saturated)


# --------------------------------------------------------------------------
# File format: one or more hypersubstitutions, each a block of
# "hsub NAME -> TERM" lines covering every signature symbol; blocks are
# separated by blank lines (or by a symbol repeating).
# --------------------------------------------------------------------------

def parse_hsub_block(lines: list[str], sig: Signature) -> Hypersubstitution:
    assignments: dict[str, Term] = {}
    for line in lines:
        m = re.fullmatch(r"hsub\s+([A-Za-z_][A-Za-z0-9_]*)\s*->\s*(.+)", line.strip())
        if not m:
            raise ParseError(f"malformed hsub line: {line!r}")
        name, image_text = m.group(1), m.group(2)
        if name not in sig:
            raise ParseError(f"hsub for undeclared symbol {name!r}")
        if name in assignments:
            raise ParseError(f"duplicate hsub for symbol {name!r}")
        assignments[name] = parse_term(image_text, sig)
    missing = [name for name, _ in sig.symbols if name not in assignments]
    if missing:
        raise ParseError(f"hsub block missing symbols: {', '.join(missing)}")
    images = tuple(assignments[name] for name, _ in sig.symbols)
    try:
        return Hypersubstitution(sig, images)
    except ValueError as e:
        raise ParseError(str(e)) from None


def parse_hsub_file(text: str, sig: Signature) -> list[Hypersubstitution]:
    """Parse a .hsub file into the hypersubstitutions it declares."""
    blocks: list[list[str]] = []
    current: list[str] = []
    declared: set[str] = set()
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            if current:
                blocks.append(current)
                current, declared = [], set()
            continue
        name_match = re.match(r"hsub\s+([A-Za-z_][A-Za-z0-9_]*)", line)
        if name_match and name_match.group(1) in declared:
            blocks.append(current)
            current, declared = [], set()
        if name_match:
            declared.add(name_match.group(1))
        current.append(line)
    if current:
        blocks.append(current)
    if not blocks:
        raise ParseError("hsub file declares no hypersubstitution")
    return [parse_hsub_block(b, sig) for b in blocks]


def print_hsub(sigma: Hypersubstitution) -> str:
    lines = [
        f"hsub {name} -> {img}"
        for (name, _), img in zip(sigma.signature.symbols, sigma.images)
    ]
    return "\n".join(lines) + "\n"


def load_hsubs(path, sig: Signature) -> list[Hypersubstitution]:
    with open(path, encoding="utf-8") as fh:
        return parse_hsub_file(fh.read(), sig)
