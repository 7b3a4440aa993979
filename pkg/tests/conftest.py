

import pytest

from hyperq import (
    FiniteAlgebra,
    Hypersubstitution,
    Signature,
    Theory,
    parse_quasi_identity,
    parse_signature,
    parse_term,
)


@pytest.fixture(scope="session")
def sig_f2() -> Signature:
    return parse_signature("sig f/2")


@pytest.fixture(scope="session")
def leftzero(sig_f2) -> FiniteAlgebra:
    return FiniteAlgebra("leftzero", 2, sig_f2, ((0, 0, 1, 1),))


@pytest.fixture(scope="session")
def rightzero(sig_f2) -> FiniteAlgebra:
    return FiniteAlgebra("rightzero", 2, sig_f2, ((0, 1, 0, 1),))


@pytest.fixture(scope="session")
def meet2(sig_f2) -> FiniteAlgebra:
    return FiniteAlgebra("meet2", 2, sig_f2, ((0, 0, 0, 1),))


def make_zn(n: int, sig: Signature) -> FiniteAlgebra:
    table = tuple((a + b) % n for a in range(n) for b in range(n))
    return FiniteAlgebra(f"z{n}", n, sig, (table,))


@pytest.fixture(scope="session")
def z2(sig_f2) -> FiniteAlgebra:
    return make_zn(2, sig_f2)


@pytest.fixture(scope="session")
def z3(sig_f2) -> FiniteAlgebra:
    return make_zn(3, sig_f2)


@pytest.fixture(scope="session")
def leftzero3(sig_f2) -> FiniteAlgebra:
    table = tuple(a for a in range(3) for _ in range(3))
    return FiniteAlgebra("leftzero3", 3, sig_f2, (table,))


S1_TEXT = "f(x,f(y,z)) = f(f(x,y),z)"
S2_TEXT = "f(x,x) = x"
S3_TEXT = "f(f(x,y),f(u,v)) = f(f(x,u),f(y,v))"
S4_TEXT = "f(x,y) = f(y,x) -> x = y"
MEDIAL_TEXT = "f(f(u,v),f(x,y)) = f(f(u,x),f(v,y))"


@pytest.fixture(scope="session")
def basis_theory(sig_f2) -> Theory:
    return Theory(
        sig_f2,
        tuple(parse_quasi_identity(t, sig_f2) for t in (S1_TEXT, S2_TEXT, S3_TEXT, S4_TEXT)),
    )


@pytest.fixture(scope="session")
def swap_hsub(sig_f2) -> Hypersubstitution:
    return Hypersubstitution(sig_f2, (parse_term("f(x2,x1)", sig_f2),))


@pytest.fixture(scope="session")
def proj1_hsub(sig_f2) -> Hypersubstitution:
    return Hypersubstitution(sig_f2, (parse_term("x1", sig_f2),))
