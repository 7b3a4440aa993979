"""Bounded equational-deduction closures.

The closure of a set of identities under the classical deduction rules
(reflexivity, symmetry, transitivity, replacement of subterms, variable
substitution), optionally extended by the hypersubstitution rule (apply a
hypersubstitution to both sides), is computed inside a finite universe: all
terms over a fixed variable pool up to a node-count bound.  Results whose
terms exceed the bound are discarded, which makes every closure finite and
saturation decidable; the price is that closure facts are statements about
the bounded fragment only.

Internally the identity set is kept as a union-find partition of the
universe: reflexivity, symmetry and transitivity are free; replacement is
congruence propagation (equal arguments force equal applications); the
substitution and hypersubstitution rules fire on each pair of terms the
moment their classes merge, which reaches the same fixpoint as round-based
saturation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .hypersubst import Hypersubstitution, apply_hsub
from .syntax import (
    App,
    Equation,
    Signature,
    Term,
    Var,
    substitute_vars,
    term_size,
    variables_of,
)


@dataclass(frozen=True)
class Bounds:
    max_term_size: int = 7
    max_steps: int = 1_000_000  # union events before giving up
    sigma_image_size: int = 5  # image budget for the full hypersubstitution rule
    variables: tuple[str, ...] | None = None  # None: pool from the seed set


def _size_splits(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total - parts + 1, 0, -1):
        for rest in _size_splits(total - first, parts - 1):
            yield (first, *rest)


def enumerate_terms(sig: Signature, pool: tuple[str, ...], max_size: int) -> list[Term]:
    """All terms over the variable pool with at most max_size nodes,
    ascending by size, deterministic within each size."""
    by_size: dict[int, list[Term]] = {1: [Var(v) for v in pool]}
    out: list[Term] = list(by_size[1])
    for s in range(2, max_size + 1):
        bucket: list[Term] = []
        for sym, arity in sig.symbols:
            for split in _size_splits(s - 1, arity):
                pools = [by_size.get(sz, []) for sz in split]
                if any(not p for p in pools):
                    continue
                for combo in itertools.product(*pools):
                    bucket.append(App(sym, combo))
        by_size[s] = bucket
        out.extend(bucket)
    return out


def enumerate_hsubs(sig: Signature, max_image_size: int) -> list[Hypersubstitution]:
    """Every hypersubstitution whose images stay within the size budget."""
    image_pools = []
    for _, arity in sig.symbols:
        pool = tuple(f"x{i}" for i in range(1, arity + 1))
        image_pools.append(enumerate_terms(sig, pool, max_image_size))
    return [
        Hypersubstitution(sig, tuple(images))
        for images in itertools.product(*image_pools)
    ]


# --------------------------------------------------------------------------
# Closure engine
# --------------------------------------------------------------------------

class _Engine:
    def __init__(self, sig: Signature, pool: tuple[str, ...], bounds: Bounds,
                 sigmas: list[Hypersubstitution] | None):
        self.sig = sig
        self.pool = pool
        self.bounds = bounds
        self.sigmas = sigmas or []
        self.terms = enumerate_terms(sig, pool, bounds.max_term_size)
        self.ids: dict[Term, int] = {t: i for i, t in enumerate(self.terms)}
        n = len(self.terms)
        self.parent = list(range(n))
        self.members: list[list[int]] = [[i] for i in range(n)]
        # congruence bookkeeping
        self.sizes = [term_size(t) for t in self.terms]
        self.var_counts = [self._count_vars(t) for t in self.terms]
        self.use: list[list[int]] = [[] for _ in range(n)]  # apps using a class
        self.sig_table: dict[tuple, int] = {}
        for i, t in enumerate(self.terms):
            if isinstance(t, App):
                for a in t.args:
                    self.use[self.ids[a]].append(i)
                self.sig_table[self._sig_key(i)] = i
        self.pending: list[tuple[int, int]] = []
        self.steps = 0
        self.saturated = True
        self._by_size: dict[int, list[Term]] = {}
        for t in self.terms:
            self._by_size.setdefault(term_size(t), []).append(t)
        # per-sigma image table over the whole universe (-1: leaves the bound)
        bound = bounds.max_term_size
        self._sigma_images: list[list[int]] = []
        for sigma in self.sigmas:
            row = []
            for t in self.terms:
                img = apply_hsub(sigma, t)
                row.append(self.ids[img] if term_size(img) <= bound else -1)
            self._sigma_images.append(row)
        self._subst_cache: dict[tuple, int] = {}

    def _count_vars(self, t: Term) -> dict[str, int]:
        counts: dict[str, int] = {}
        stack = [t]
        while stack:
            node = stack.pop()
            if isinstance(node, Var):
                counts[node.name] = counts.get(node.name, 0) + 1
            else:
                stack.extend(node.args)
        return counts

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def _sig_key(self, app_id: int) -> tuple:
        t = self.terms[app_id]
        assert isinstance(t, App)
        return (t.symbol, *(self.find(self.ids[a]) for a in t.args))

    def push(self, a: int, b: int) -> None:
        self.pending.append((a, b))

    def run(self) -> None:
        while self.pending:
            a, b = self.pending.pop()
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            if self.steps >= self.bounds.max_steps:
                self.saturated = False
                return
            self.steps += 1
            if len(self.members[ra]) < len(self.members[rb]):
                ra, rb = rb, ra
            # fire substitution/hypersubstitution instances on the new pairs
            self._fire_maps(self.members[ra], self.members[rb])
            # merge rb into ra
            self.parent[rb] = ra
            self.members[ra].extend(self.members[rb])
            self.members[rb] = []
            # congruence: re-signature applications that used class rb
            moved = self.use[rb]
            self.use[rb] = []
            for app_id in moved:
                key = self._sig_key(app_id)
                other = self.sig_table.get(key)
                if other is None:
                    self.sig_table[key] = app_id
                elif self.find(other) != self.find(app_id):
                    self.push(other, app_id)
            self.use[ra].extend(moved)

    # ---- substitution / hypersubstitution firing ----

    def _fire_maps(self, left: list[int], right: list[int]) -> None:
        for a in left:
            for b in right:
                self._fire_pair(a, b)

    def _subst_id(self, term_id: int, theta: dict[str, Term]) -> int:
        relevant = tuple(
            (v, self.ids[theta[v]]) for v in sorted(self.var_counts[term_id]) if v in theta
        )
        if not relevant:
            return term_id
        key = (term_id, relevant)
        hit = self._subst_cache.get(key)
        if hit is None:
            hit = self.ids[substitute_vars(self.terms[term_id], theta)]
            self._subst_cache[key] = hit
        return hit

    def _fire_pair(self, a: int, b: int) -> None:
        for theta in self._feasible_substitutions(a, b):
            ia = self._subst_id(a, theta)
            ib = self._subst_id(b, theta)
            if ia != ib:
                self.push(ia, ib)
        for row in self._sigma_images:
            ia, ib = row[a], row[b]
            if ia >= 0 and ib >= 0 and ia != ib:
                self.push(ia, ib)

    def _feasible_substitutions(self, a: int, b: int):
        """Variable maps into the universe keeping both images within bound.

        The identity map is skipped (it reproduces the pair itself).
        """
        bound = self.bounds.max_term_size
        ca, cb = self.var_counts[a], self.var_counts[b]
        vars_ab = sorted(set(ca) | set(cb))
        base_a, base_b = self.sizes[a], self.sizes[b]

        def rec(i: int, grow_a: int, grow_b: int, acc: dict[str, Term]):
            if i == len(vars_ab):
                if any(not (isinstance(img, Var) and img.name == v)
                       for v, img in acc.items()):
                    yield dict(acc)
                return
            v = vars_ab[i]
            na, nb = ca.get(v, 0), cb.get(v, 0)
            max_extra = min(
                (bound - base_a - grow_a) // na if na else bound,
                (bound - base_b - grow_b) // nb if nb else bound,
            )
            for sz in range(1, max_extra + 2):
                ga = grow_a + na * (sz - 1)
                gb = grow_b + nb * (sz - 1)
                if base_a + ga > bound or base_b + gb > bound:
                    break
                for img in self._by_size.get(sz, []):
                    acc[v] = img
                    yield from rec(i + 1, ga, gb, acc)
            acc.pop(v, None)

        yield from rec(0, 0, 0, {})


@dataclass(frozen=True)
class ClosureSet:
    """Bounded identity closure, stored as a partition of the term universe."""

    signature: Signature
    pool: tuple[str, ...]
    bounds: Bounds
    terms: tuple[Term, ...]
    roots: tuple[int, ...]  # canonical class root per term id
    saturated: bool
    rules: str  # "E" | "EH" | "EMH"
    _ids: dict[Term, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        self._ids.update({t: i for i, t in enumerate(self.terms)})

    def __contains__(self, eq: Equation) -> bool:
        i = self._ids.get(eq.lhs)
        j = self._ids.get(eq.rhs)
        return i is not None and j is not None and self.roots[i] == self.roots[j]

    def classes(self) -> list[list[int]]:
        buckets: dict[int, list[int]] = {}
        for i, r in enumerate(self.roots):
            buckets.setdefault(r, []).append(i)
        return [buckets[r] for r in sorted(buckets)]

    @property
    def size(self) -> int:
        """Number of unordered identities, reflexive ones included."""
        return sum(len(c) * (len(c) + 1) // 2 for c in self.classes())

    def identities(self) -> list[Equation]:
        out = []
        for cls in self.classes():
            for x in range(len(cls)):
                for y in range(x, len(cls)):
                    out.append(Equation(self.terms[cls[x]], self.terms[cls[y]]))
        return out

    def partition(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(c) for c in self.classes())

    def same_relation(self, other: "ClosureSet") -> bool:
        if self.terms != other.terms:
            raise ValueError("closures over different universes")
        return self.partition() == other.partition()


def _resolve_pool(eqs, bounds: Bounds) -> tuple[str, ...]:
    if bounds.variables is not None:
        return tuple(bounds.variables)
    pool: list[str] = []
    seen = set()
    for eq in eqs:
        for side in (eq.lhs, eq.rhs):
            for v in variables_of(side):
                if v not in seen:
                    seen.add(v)
                    pool.append(v)
    return tuple(pool) if pool else ("x", "y")


def _close(sig: Signature, eqs, bounds: Bounds,
           sigmas: list[Hypersubstitution] | None, rules: str) -> ClosureSet:
    eqs = list(eqs)
    pool = _resolve_pool(eqs, bounds)
    eng = _Engine(sig, pool, bounds, sigmas)
    for eq in eqs:
        i = eng.ids.get(eq.lhs)
        j = eng.ids.get(eq.rhs)
        if i is None or j is None:
            continue  # seed outside the bounded universe
        eng.push(i, j)
    eng.run()
    roots = tuple(eng.find(i) for i in range(len(eng.terms)))
    return ClosureSet(sig, pool, bounds, tuple(eng.terms), roots, eng.saturated, rules)


def birkhoff_closure(sig: Signature, eqs, bounds: Bounds = Bounds()) -> ClosureSet:
    """Closure under the classical five rules only."""
    return _close(sig, eqs, bounds, None, "E")


def hyper_closure(sig: Signature, eqs, bounds: Bounds = Bounds()) -> ClosureSet:
    """Classical rules plus the hypersubstitution rule over the full image
    budget (every hypersubstitution with images within sigma_image_size)."""
    sigmas = enumerate_hsubs(sig, bounds.sigma_image_size)
    return _close(sig, eqs, bounds, sigmas, "EH")


def m_hyper_closure(sig: Signature, eqs, M, bounds: Bounds = Bounds()) -> ClosureSet:
    """Classical rules plus the hypersubstitution rule restricted to M."""
    return _close(sig, eqs, bounds, list(M.elements), "EMH")


# --------------------------------------------------------------------------
# Rule-6 closedness test and closure comparison
# --------------------------------------------------------------------------

def is_closed_under_rule6(
    identities,
    sigmas,
    bounds: Bounds = Bounds(),
) -> tuple[bool, tuple[Equation, Hypersubstitution, Equation] | None]:
    """Is every in-bound hypersubstitution image of every identity again in
    the set?  Returns (flag, first witness (identity, sigma, missing image)).

    Accepts a ClosureSet or any iterable of Equations (bare sets are read
    modulo symmetry).
    """
    bound = bounds.max_term_size
    if isinstance(identities, ClosureSet):
        eqs = identities.identities()

        def member(eq: Equation) -> bool:
            return eq in identities
    else:
        eqs = list(identities)
        bare = set()
        for eq in eqs:
            bare.add((eq.lhs, eq.rhs))
            bare.add((eq.rhs, eq.lhs))

        def member(eq: Equation) -> bool:
            return (eq.lhs, eq.rhs) in bare or eq.lhs == eq.rhs

    for eq in eqs:
        for sigma in sigmas:
            img_l = apply_hsub(sigma, eq.lhs)
            if term_size(img_l) > bound:
                continue
            img_r = apply_hsub(sigma, eq.rhs)
            if term_size(img_r) > bound:
                continue
            image = Equation(img_l, img_r)
            if not member(image):
                return False, (eq, sigma, image)
    return True, None


@dataclass(frozen=True)
class ClosureComparison:
    e: ClosureSet
    eh: ClosureSet
    emh: ClosureSet | None
    e_equals_eh: bool
    e_equals_emh: bool | None

    def summary(self) -> str:
        parts = [f"E size={self.e.size}", f"EH size={self.eh.size}"]
        if self.emh is not None:
            parts.append(f"EMH size={self.emh.size}")
        parts.append(f"E=EH:{str(self.e_equals_eh).lower()}")
        if self.e_equals_emh is not None:
            parts.append(f"E=EMH:{str(self.e_equals_emh).lower()}")
        return " ".join(parts)


def compare_closures(
    sig: Signature, eqs, M=None, bounds: Bounds = Bounds()
) -> ClosureComparison:
    """Compute the bounded closures side by side and compare them as sets."""
    eqs = list(eqs)
    pool = _resolve_pool(eqs, bounds)
    fixed = Bounds(bounds.max_term_size, bounds.max_steps, bounds.sigma_image_size, pool)
    e = birkhoff_closure(sig, eqs, fixed)
    eh = hyper_closure(sig, eqs, fixed)
    emh = m_hyper_closure(sig, eqs, M, fixed) if M is not None else None
    return ClosureComparison(
        e,
        eh,
        emh,
        e.same_relation(eh),
        e.same_relation(emh) if emh is not None else None,
    )
