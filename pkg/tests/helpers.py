"""Seeded random generators shared across test modules."""

import random

from hyperq import FiniteAlgebra, Hypersubstitution, Signature
from hyperq.syntax import App, Equation, QuasiIdentity, Var


def random_term(rng: random.Random, sig: Signature, variables, max_size: int):
    """Random term, at most max_size nodes."""
    if max_size < 3 or rng.random() < 0.3:
        return Var(rng.choice(variables))
    name, arity = rng.choice(sig.symbols)
    if max_size < 1 + arity:
        return Var(rng.choice(variables))
    budget = max_size - 1
    args = []
    for i in range(arity):
        remaining_slots = arity - i - 1
        size_i = rng.randint(1, budget - remaining_slots)
        args.append(random_term(rng, sig, variables, size_i))
        budget -= size_i
    return App(name, tuple(args))


def random_algebra(rng: random.Random, sig: Signature, n: int, name="rand") -> FiniteAlgebra:
    tables = tuple(
        tuple(rng.randrange(n) for _ in range(n**arity)) for _, arity in sig.symbols
    )
    return FiniteAlgebra(name, n, sig, tables)


def random_hsub(rng: random.Random, sig: Signature, max_image_size: int) -> Hypersubstitution:
    images = []
    for _, arity in sig.symbols:
        variables = [f"x{i}" for i in range(1, arity + 1)]
        images.append(random_term(rng, sig, variables, max_image_size))
    return Hypersubstitution(sig, tuple(images))


def random_quasi_identity(rng: random.Random, sig: Signature, variables,
                          max_premises: int, max_size: int):
    def eq():
        while True:
            lhs = random_term(rng, sig, variables, max_size)
            rhs = random_term(rng, sig, variables, max_size)
            if lhs != rhs:
                return Equation(lhs, rhs)

    premises = tuple(eq() for _ in range(rng.randint(0, max_premises)))
    return QuasiIdentity(premises, eq())
