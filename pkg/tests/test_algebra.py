import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperq import (
    FiniteAlgebra,
    apply_hsub,
    compose,
    derived_algebra,
    enumerate_term_operations,
    eval_term,
    identity_hsub,
    parse_algebra,
    parse_signature,
    parse_term,
    print_algebra,
    semantic_hsubs,
    term_operation,
)
from hyperq.algebra import EvalError, slices_for_signature
from hyperq.syntax import ParseError, Var

from helpers import random_algebra, random_hsub, random_term


# --------------------------------------------------------------------------
# Independent oracle: the set of binary term-operation tables, computed by
# naive fixpoint over dict-of-tuples (no kernels, no witnesses).
# --------------------------------------------------------------------------

def oracle_term_tables(A: FiniteAlgebra, arity: int) -> set[tuple[int, ...]]:
    n = A.carrier_size
    envs = list(itertools.product(range(n), repeat=arity))

    def proj(j):
        return tuple(e[j] for e in envs)

    current = {proj(j) for j in range(arity)}
    while True:
        new = set()
        for sym, m in A.signature.symbols:
            table = A.table(sym)
            for combo in itertools.product(current, repeat=m):
                out = []
                for pos in range(len(envs)):
                    idx = 0
                    for g in combo:
                        idx = idx * n + g[pos]
                    out.append(table[idx])
                t = tuple(out)
                if t not in current:
                    new.add(t)
        if not new:
            return current
        current |= new


class TestEvalTerm:
    def test_variable(self, leftzero):
        assert eval_term(leftzero, Var("x"), {"x": 1}) == 1

    def test_leftzero_nested(self, leftzero, sig_f2):
        t = parse_term("f(x,f(y,x))", sig_f2)
        assert eval_term(leftzero, t, {"x": 1, "y": 0}) == 1

    def test_z2_addition(self, z2, sig_f2):
        t = parse_term("f(x,f(x,y))", sig_f2)
        assert eval_term(z2, t, {"x": 1, "y": 1}) == 1

    def test_unbound_variable(self, leftzero, sig_f2):
        with pytest.raises(EvalError, match="unbound"):
            eval_term(leftzero, parse_term("f(x,y)", sig_f2), {"x": 0})


class TestTermOperation:
    def test_projection_table(self, leftzero, sig_f2):
        op = term_operation(leftzero, parse_term("x1", sig_f2), 2)
        assert op.table == (0, 0, 1, 1)

    def test_xor_table(self, z2, sig_f2):
        op = term_operation(z2, parse_term("f(x1,x2)", sig_f2), 2)
        assert op.table == (0, 1, 1, 0)

    def test_double_add_is_second_projection(self, z2, sig_f2):
        op = term_operation(z2, parse_term("f(x1,f(x1,x2))", sig_f2), 2)
        assert op.table == (0, 1, 0, 1)

    def test_stray_variable_rejected(self, z2, sig_f2):
        with pytest.raises(EvalError, match="x1..x2"):
            term_operation(z2, parse_term("f(x1,y)", sig_f2), 2)

    def test_witness_reproduces_table(self, z3, sig_f2):
        rng = random.Random(5)
        for _ in range(25):
            t = random_term(rng, sig_f2, ["x1", "x2"], 9)
            op = term_operation(z3, t, 2)
            again = term_operation(z3, op.witness, 2)
            assert again.table == op.table


class TestCloneSlices:
    def test_meet_has_three_binary_ops(self, meet2):
        sl = enumerate_term_operations(meet2, 2)
        assert len(sl.ops) == 3
        assert sl.complete
        assert {op.table for op in sl.ops} == oracle_term_tables(meet2, 2)

    def test_z2_has_four_binary_ops(self, z2):
        sl = enumerate_term_operations(z2, 2)
        assert len(sl.ops) == 4
        assert {op.table for op in sl.ops} == oracle_term_tables(z2, 2)
        # the constant-0 operation arises from doubling
        witnesses = {str(op.witness): op.table for op in sl.ops}
        assert witnesses["f(x1,x1)"] == (0, 0, 0, 0)

    def test_leftzero_has_only_projections(self, leftzero):
        sl = enumerate_term_operations(leftzero, 2)
        assert len(sl.ops) == 2
        assert {op.table for op in sl.ops} == {(0, 0, 1, 1), (0, 1, 0, 1)}

    def test_unary_slice_of_leftzero(self, leftzero):
        sl = enumerate_term_operations(leftzero, 1)
        assert len(sl.ops) == 1
        assert sl.ops[0].table == (0, 1)

    def test_matches_oracle_on_random_algebras(self, sig_f2):
        rng = random.Random(11)
        for _ in range(10):
            A = random_algebra(rng, sig_f2, 2)
            sl = enumerate_term_operations(A, 2)
            assert {op.table for op in sl.ops} == oracle_term_tables(A, 2)

    def test_matches_oracle_multi_symbol(self):
        sig = parse_signature("sig f/2 g/1")
        rng = random.Random(13)
        for _ in range(6):
            A = random_algebra(rng, sig, 2)
            sl = enumerate_term_operations(A, 2)
            assert {op.table for op in sl.ops} == oracle_term_tables(A, 2)

    def test_cap_marks_incomplete(self, z3):
        sl = enumerate_term_operations(z3, 2, cap=3)
        assert not sl.complete
        assert len(sl.ops) == 3

    def test_witness_consistency(self, z3):
        sl = enumerate_term_operations(z3, 2)
        for op in sl.ops:
            assert term_operation(z3, op.witness, 2).table == op.table

    def test_complete_slice_is_closed(self, meet2):
        sl = enumerate_term_operations(meet2, 2)
        tables = {op.table for op in sl.ops}
        n = meet2.carrier_size
        for g, h in itertools.product(sl.ops, repeat=2):
            composed = tuple(
                meet2.table("f")[g.table[i] * n + h.table[i]] for i in range(n * n)
            )
            assert composed in tables

    def test_minimal_witness_sizes(self, z2):
        # every witness is a smallest term inducing its table: check against
        # exhaustive enumeration of terms by size
        from hyperq.syntax import term_size
        from hyperq.inference import enumerate_terms

        sl = enumerate_term_operations(z2, 2)
        best: dict[tuple, int] = {}
        for t in enumerate_terms(z2.signature, ("x1", "x2"), 7):
            table = term_operation(z2, t, 2).table
            best.setdefault(table, term_size(t))
        for op in sl.ops:
            assert term_size(op.witness) == best[op.table]


class TestDerivedAlgebra:
    def test_identity_gives_same_tables(self, leftzero, sig_f2):
        B = derived_algebra(leftzero, identity_hsub(sig_f2))
        assert B == leftzero

    def test_swap_turns_leftzero_into_rightzero(self, leftzero, rightzero, swap_hsub):
        assert derived_algebra(leftzero, swap_hsub) == rightzero

    def test_doubling_collapses_z2(self, z2, sig_f2):
        sigma = type(identity_hsub(sig_f2))(sig_f2, (parse_term("f(x1,x1)", sig_f2),))
        assert derived_algebra(z2, sigma).tables == ((0, 0, 0, 0),)


class TestSemanticHsubs:
    def test_leftzero_has_two_choices(self, leftzero):
        sem = semantic_hsubs(leftzero, slices_for_signature(leftzero))
        assert len(sem.choices) == 2
        assert sem.complete

    def test_z2_has_four_choices(self, z2):
        sem = semantic_hsubs(z2, slices_for_signature(z2))
        assert len(sem.choices) == 4

    def test_product_count_two_symbols(self):
        sig = parse_signature("sig f/2 g/2")
        table = tuple((a + b) % 2 for a in range(2) for b in range(2))
        A = FiniteAlgebra("zz", 2, sig, (table, table))
        sem = semantic_hsubs(A, slices_for_signature(A))
        sl = enumerate_term_operations(A, 2)
        assert len(sem.choices) == len(sl.ops) ** 2

    def test_incomplete_slice_flagged(self, z3):
        slices = {2: enumerate_term_operations(z3, 2, cap=2)}
        sem = semantic_hsubs(z3, slices)
        assert not sem.complete


class TestAlgebraFiles:
    def test_roundtrip(self, leftzero):
        assert parse_algebra(print_algebra(leftzero)) == leftzero

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            parse_algebra("algebra a\ncarrier 2\nop f/2 = [0,0,1]\nend\n")
        with pytest.raises(ParseError, match="end"):
            parse_algebra("algebra a\ncarrier 2\nop f/2 = [0,0,1,1]\n")
        with pytest.raises(ParseError):
            parse_algebra("carrier 2\nend\n")

    def test_whitespace_insensitive_entries(self, leftzero):
        text = "algebra leftzero\ncarrier 2\nop f/2 = [ 0, 0 ,1,1 ]\nend\n"
        assert parse_algebra(text) == leftzero

    def test_out_of_range_entry(self):
        with pytest.raises(ParseError):
            parse_algebra("algebra a\ncarrier 2\nop f/2 = [0,0,1,2]\nend\n")


# --------------------------------------------------------------------------
# Cross-module invariants
# --------------------------------------------------------------------------

SIGS = [parse_signature("sig f/2"), parse_signature("sig f/2 g/1")]
VARS = ["x", "y", "z"]


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=120, deadline=None)
def test_realization_lemma(seed):
    """Evaluating t in the derived algebra equals evaluating the transformed
    term in the base algebra, at every environment."""
    rng = random.Random(seed)
    sig = rng.choice(SIGS)
    n = rng.randint(1, 3)
    A = random_algebra(rng, sig, n)
    sigma = random_hsub(rng, sig, 7)
    t = random_term(rng, sig, VARS, 7)
    B = derived_algebra(A, sigma)
    st_ = apply_hsub(sigma, t)
    for env_vals in itertools.product(range(n), repeat=len(VARS)):
        env = dict(zip(VARS, env_vals))
        assert eval_term(B, t, env) == eval_term(A, st_, env)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=120, deadline=None)
def test_iterated_derivation_matches_composition(seed):
    rng = random.Random(seed)
    sig = rng.choice(SIGS)
    A = random_algebra(rng, sig, rng.randint(1, 3))
    s1 = random_hsub(rng, sig, 6)
    s2 = random_hsub(rng, sig, 6)
    assert derived_algebra(derived_algebra(A, s2), s1) == derived_algebra(A, compose(s2, s1))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_derived_algebra_slice_is_contained_in_base_slice(seed):
    """Term operations of a derived algebra are term operations of the base
    algebra (its operations already are)."""
    rng = random.Random(seed)
    sig = SIGS[0]
    A = random_algebra(rng, sig, 2)
    sigma = random_hsub(rng, sig, 7)
    B = derived_algebra(A, sigma)
    base = {op.table for op in enumerate_term_operations(A, 2).ops}
    derived = {op.table for op in enumerate_term_operations(B, 2).ops}
    assert derived <= base


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_equal_tables_give_equal_derived_algebras(seed):
    """Hypersubstitutions inducing the same per-symbol tables derive the
    same algebra."""
    rng = random.Random(seed)
    sig = SIGS[0]
    A = random_algebra(rng, sig, 2)
    s1 = random_hsub(rng, sig, 7)
    s2 = random_hsub(rng, sig, 7)
    t1 = term_operation(A, s1.images[0], 2).table
    t2 = term_operation(A, s2.images[0], 2).table
    if t1 == t2:
        assert derived_algebra(A, s1) == derived_algebra(A, s2)
    else:
        assert derived_algebra(A, s1) != derived_algebra(A, s2)
