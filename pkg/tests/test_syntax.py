import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperq import (
    parse_quasi_identity,
    parse_signature,
    parse_term,
    parse_theory,
    print_quasi_identity,
    print_signature,
    print_term,
    print_theory,
    substitute_vars,
    variables_of,
)
from hyperq.syntax import App, ParseError, Signature, Theory, Var, term_size

from helpers import random_quasi_identity, random_term


class TestParseSignature:
    def test_single_symbol(self):
        sig = parse_signature("sig f/2")
        assert sig.symbols == (("f", 2),)

    def test_two_symbols_in_order(self):
        sig = parse_signature("sig f/2 g/1")
        assert sig.symbols == (("f", 2), ("g", 1))

    def test_duplicate_symbol_rejected(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_signature("sig f/2 f/3")

    def test_nullary_rejected(self):
        with pytest.raises(ParseError, match="arity 0"):
            parse_signature("sig c/0")

    def test_malformed_token(self):
        with pytest.raises(ParseError):
            parse_signature("sig f-2")

    def test_missing_keyword(self):
        with pytest.raises(ParseError):
            parse_signature("f/2")


class TestParseTerm:
    def test_nested_application(self, sig_f2):
        t = parse_term("f(x,f(y,z))", sig_f2)
        assert t == App("f", (Var("x"), App("f", (Var("y"), Var("z")))))

    def test_arity_mismatch(self, sig_f2):
        with pytest.raises(ParseError, match="arguments"):
            parse_term("f(x)", sig_f2)

    def test_bare_variable(self, sig_f2):
        assert parse_term("x", sig_f2) == Var("x")

    def test_whitespace_insensitive(self, sig_f2):
        assert parse_term(" f( x , f(y ,z) ) ", sig_f2) == parse_term("f(x,f(y,z))", sig_f2)

    def test_empty_input(self, sig_f2):
        with pytest.raises(ParseError, match="empty"):
            parse_term("   ", sig_f2)

    def test_unbalanced_parens(self, sig_f2):
        with pytest.raises(ParseError):
            parse_term("f(x,y", sig_f2)

    def test_symbol_without_args(self, sig_f2):
        with pytest.raises(ParseError):
            parse_term("f", sig_f2)


class TestParseQuasiIdentity:
    def test_implication(self, sig_f2):
        q = parse_quasi_identity("f(x,y) = f(y,x) -> x = y", sig_f2)
        assert len(q.premises) == 1
        assert str(q.conclusion) == "x = y"

    def test_bare_equation_has_no_premises(self, sig_f2):
        q = parse_quasi_identity("f(x,x) = x", sig_f2)
        assert q.premises == ()
        assert q.is_identity

    def test_associativity_shape(self, sig_f2):
        q = parse_quasi_identity("f(x,f(y,z)) = f(f(x,y),z)", sig_f2)
        assert q.premises == ()

    def test_multiple_premises(self, sig_f2):
        q = parse_quasi_identity("x = y & f(x,x) = y -> f(y,y) = x", sig_f2)
        assert len(q.premises) == 2

    def test_missing_equals(self, sig_f2):
        with pytest.raises(ParseError, match="="):
            parse_quasi_identity("f(x,y) -> x = y", sig_f2)


class TestTheoryFile:
    def test_parse_and_print_roundtrip(self):
        text = "sig f/2\n# a comment\nf(x,x) = x\nf(x,y) = f(y,x) -> x = y\n"
        thy = parse_theory(text)
        assert len(thy.axioms) == 2
        assert parse_theory(print_theory(thy)) == thy

    def test_no_signature(self):
        with pytest.raises(ParseError, match="signature"):
            parse_theory("# only a comment\n")

    def test_error_carries_line_number(self):
        with pytest.raises(ParseError, match="line 3"):
            parse_theory("sig f/2\nf(x,x) = x\nf(x) = x\n")


class TestTheoryValidation:
    def test_axiom_over_wrong_signature_rejected(self, sig_f2):
        other = parse_signature("sig g/2")
        q = parse_quasi_identity("g(x,y) = x", other)
        with pytest.raises(ParseError, match="not declared"):
            Theory(sig_f2, (q,))

    def test_arity_mismatch_rejected(self, sig_f2):
        bad = App("f", (Var("x"),))
        from hyperq.syntax import Equation, QuasiIdentity

        with pytest.raises(ParseError, match="arguments"):
            Theory(sig_f2, (QuasiIdentity((), Equation(bad, Var("x"))),))


class TestVariablesOf:
    def test_first_occurrence_order(self, sig_f2):
        assert variables_of(parse_term("f(x,f(y,x))", sig_f2)) == ["x", "y"]

    def test_single_variable(self):
        assert variables_of(Var("z")) == ["z"]

    def test_left_to_right(self, sig_f2):
        t = parse_term("f(f(u,v),f(x,y))", sig_f2)
        assert variables_of(t) == ["u", "v", "x", "y"]


class TestSubstituteVars:
    def test_duplicate_occurrences(self, sig_f2):
        t = parse_term("f(x,x)", sig_f2)
        m = {"x": parse_term("f(y,y)", sig_f2)}
        assert substitute_vars(t, m) == parse_term("f(f(y,y),f(y,y))", sig_f2)

    def test_empty_mapping_is_identity(self, sig_f2):
        t = parse_term("f(x,f(y,z))", sig_f2)
        assert substitute_vars(t, {}) == t

    def test_simultaneous_not_sequential(self, sig_f2):
        t = parse_term("f(x,y)", sig_f2)
        m = {"x": Var("y"), "y": Var("x")}
        assert substitute_vars(t, m) == parse_term("f(y,x)", sig_f2)


# --------------------------------------------------------------------------
# Properties
# --------------------------------------------------------------------------

SIG_POOL = [
    parse_signature("sig f/2"),
    parse_signature("sig f/2 g/1"),
    parse_signature("sig h/3 f/2"),
]
VARS = ["x", "y", "z", "u", "w"]


@st.composite
def random_ast(draw):
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    sig = draw(st.sampled_from(SIG_POOL))
    return sig, random_term(rng, sig, VARS, draw(st.integers(1, 13)))


@given(random_ast())
@settings(max_examples=200, deadline=None)
def test_term_print_parse_roundtrip(sig_term):
    sig, t = sig_term
    assert parse_term(print_term(t), sig) == t


@given(random_ast())
@settings(max_examples=100, deadline=None)
def test_signature_print_parse_roundtrip(sig_term):
    sig, _ = sig_term
    assert parse_signature(print_signature(sig)) == sig


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=150, deadline=None)
def test_quasi_identity_print_parse_roundtrip(seed):
    rng = random.Random(seed)
    sig = rng.choice(SIG_POOL)
    q = random_quasi_identity(rng, sig, VARS, max_premises=3, max_size=7)
    assert parse_quasi_identity(print_quasi_identity(q), sig) == q


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_theory_print_parse_roundtrip(seed):
    rng = random.Random(seed)
    sig = rng.choice(SIG_POOL)
    axioms = tuple(
        random_quasi_identity(rng, sig, VARS, 2, 6) for _ in range(rng.randint(0, 4))
    )
    thy = Theory(sig, axioms)
    assert parse_theory(print_theory(thy)) == thy


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=150, deadline=None)
def test_substitution_composes_on_disjoint_domains(seed):
    rng = random.Random(seed)
    sig = SIG_POOL[0]
    t = random_term(rng, sig, ["x", "y"], 7)
    # images over fresh variables so domains stay disjoint from ranges
    m1 = {"x": random_term(rng, sig, ["u"], 5), "y": random_term(rng, sig, ["w"], 5)}
    m2 = {"u": random_term(rng, sig, ["p"], 5), "w": random_term(rng, sig, ["q"], 5)}
    composed = {v: substitute_vars(img, m2) for v, img in m1.items()}
    assert substitute_vars(substitute_vars(t, m1), m2) == substitute_vars(t, composed)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=150, deadline=None)
def test_substitution_variable_containment(seed):
    rng = random.Random(seed)
    sig = rng.choice(SIG_POOL)
    t = random_term(rng, sig, VARS, 9)
    m = {v: random_term(rng, sig, VARS, 5) for v in rng.sample(VARS, rng.randint(0, 4))}
    allowed = set()
    for v in variables_of(t):
        if v in m:
            allowed.update(variables_of(m[v]))
        else:
            allowed.add(v)
    assert set(variables_of(substitute_vars(t, m))) <= allowed


@given(st.text(alphabet="fgxyz123(),=->&# /\t", max_size=40))
@settings(max_examples=300, deadline=None)
def test_parsers_never_crash_on_junk(text):
    """Arbitrary input either parses or raises ParseError, nothing else."""
    sig = SIG_POOL[0]
    for parser in (
        lambda: parse_signature(text),
        lambda: parse_term(text, sig),
        lambda: parse_quasi_identity(text, sig),
        lambda: parse_theory(text),
    ):
        try:
            parser()
        except ParseError:
            pass


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_term_size_counts_nodes(seed):
    rng = random.Random(seed)
    sig = SIG_POOL[0]
    t = random_term(rng, sig, VARS, 11)

    def count(node):
        if isinstance(node, Var):
            return 1
        return 1 + sum(count(a) for a in node.args)

    assert term_size(t) == count(t)
