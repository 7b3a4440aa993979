import itertools
import random

from hyperq import (
    Bounds,
    birkhoff_closure,
    check_identity,
    check_hyperidentity,
    compare_closures,
    generate_monoid,
    hyper_closure,
    is_closed_under_rule6,
    m_hyper_closure,
    parse_signature,
    parse_term,
    trivial_monoid,
)
from hyperq.hypersubst import Hypersubstitution
from hyperq.inference import enumerate_hsubs, enumerate_terms
from hyperq.syntax import Equation, term_size

from helpers import random_algebra, random_term

SIG = parse_signature("sig f/2")
COMM = Equation(parse_term("f(x,y)", SIG), parse_term("f(y,x)", SIG))
IDEM = Equation(parse_term("f(x,x)", SIG), parse_term("x", SIG))
B5 = Bounds(max_term_size=5)
B7 = Bounds(max_term_size=7)


def eq(text_l, text_r):
    return Equation(parse_term(text_l, SIG), parse_term(text_r, SIG))


class TestEnumerateTerms:
    def test_counts_over_two_variables(self):
        # sizes 1,3,5,7 over {x,y} with one binary symbol: 2, 4, 16, 80
        terms = enumerate_terms(SIG, ("x", "y"), 7)
        by_size = {}
        for t in terms:
            by_size[term_size(t)] = by_size.get(term_size(t), 0) + 1
        assert by_size == {1: 2, 3: 4, 5: 16, 7: 80}

    def test_budgeted_hsubs(self):
        # images over {x1,x2} of size <= 5: 2 + 4 + 16
        assert len(enumerate_hsubs(SIG, 5)) == 22


class TestBirkhoffClosure:
    def test_empty_seed_is_reflexive_only(self):
        c = birkhoff_closure(SIG, [], B5)
        assert c.saturated
        assert all(len(cls) == 1 for cls in c.classes())
        t = parse_term("f(x,f(y,x))", SIG)
        assert Equation(t, t) in c
        assert COMM not in c

    def test_commutativity_consequences(self):
        # the replacement context uses a fresh variable, so widen the pool
        c = birkhoff_closure(SIG, [COMM], Bounds(max_term_size=5, variables=("x", "y", "z")))
        assert c.saturated
        # replacement: commuting inside a context
        assert eq("f(f(x,y),z)", "f(f(y,x),z)") in c
        # symmetry
        assert eq("f(y,x)", "f(x,y)") in c
        # no collapse
        assert eq("x", "y") not in c

    def test_variable_collapse_relates_everything(self):
        c = birkhoff_closure(SIG, [eq("x", "y")], B5)
        terms = c.terms
        assert all(
            Equation(s, t) in c for s, t in itertools.product(terms[:12], repeat=2)
        )

    def test_oversized_seed_is_dropped(self):
        big = eq("f(f(f(x,x),f(x,x)),x)", "x")  # 9 nodes > bound 5
        c = birkhoff_closure(SIG, [big], B5)
        assert all(len(cls) == 1 for cls in c.classes())

    def test_substitution_instances_present(self):
        c = birkhoff_closure(SIG, [IDEM], Bounds(max_term_size=7, variables=("x", "y")))
        # x -> f(y,y) instance of idempotence
        assert eq("f(f(y,y),f(y,y))", "f(y,y)") in c
        # in-pool instance under the default pool as well
        d = birkhoff_closure(SIG, [IDEM], B7)
        assert eq("f(f(x,x),f(x,x))", "f(x,x)") in d


class TestHyperClosure:
    def test_projection_collapses_commutativity(self):
        c = hyper_closure(SIG, [COMM], Bounds(max_term_size=5, sigma_image_size=5))
        assert eq("x", "y") in c

    def test_empty_seed_unchanged(self):
        e = birkhoff_closure(SIG, [], B5)
        h = hyper_closure(SIG, [], B5)
        assert e.same_relation(h)

    def test_swap_invariant_seed(self):
        swap = Hypersubstitution(SIG, (parse_term("f(x2,x1)", SIG),))
        M = generate_monoid([swap])
        e = birkhoff_closure(SIG, [IDEM], B5)
        m = m_hyper_closure(SIG, [IDEM], M, B5)
        assert eq("f(x,x)", "x") in m
        assert e.same_relation(m)


class TestMHyperClosure:
    def test_trivial_monoid_equals_plain(self):
        M = trivial_monoid(SIG)
        e = birkhoff_closure(SIG, [COMM], B5)
        m = m_hyper_closure(SIG, [COMM], M, B5)
        assert e.same_relation(m)

    def test_swap_monoid_does_not_collapse_commutativity(self):
        swap = Hypersubstitution(SIG, (parse_term("f(x2,x1)", SIG),))
        M = generate_monoid([swap])
        e = birkhoff_closure(SIG, [COMM], B5)
        m = m_hyper_closure(SIG, [COMM], M, B5)
        assert eq("x", "y") not in m
        assert e.same_relation(m)

    def test_full_budget_equals_hyper(self):
        sigmas = enumerate_hsubs(SIG, 5)
        M = generate_monoid(sigmas, max_elements=100_000, max_image_size=5)
        h = hyper_closure(SIG, [COMM], B5)
        m = m_hyper_closure(SIG, [COMM], M, B5)
        assert h.same_relation(m)


class TestClosedUnderRule6:
    def test_reflexive_set_is_closed(self):
        sigmas = enumerate_hsubs(SIG, 5)
        terms = enumerate_terms(SIG, ("x", "y"), 5)
        refl = [Equation(t, t) for t in terms]
        ok, witness = is_closed_under_rule6(refl, sigmas, B5)
        assert ok and witness is None

    def test_commutativity_with_projection_is_open(self):
        proj = Hypersubstitution(SIG, (parse_term("x1", SIG),))
        ok, witness = is_closed_under_rule6([COMM], [proj], B5)
        assert not ok
        _, _, missing = witness
        assert missing == eq("x", "y")

    def test_hyper_closure_output_is_closed(self):
        bounds = Bounds(max_term_size=5, sigma_image_size=5)
        c = hyper_closure(SIG, [IDEM], bounds)
        ok, _ = is_closed_under_rule6(c, enumerate_hsubs(SIG, 5), bounds)
        assert ok


class TestCompareClosures:
    def test_closure_of_closure_satisfies_equality(self):
        bounds = Bounds(max_term_size=5, sigma_image_size=3)
        closed = hyper_closure(SIG, [IDEM], bounds)
        cmp = compare_closures(
            SIG, closed.identities(), None,
            Bounds(max_term_size=5, sigma_image_size=3, variables=closed.pool),
        )
        assert cmp.e_equals_eh

    def test_m_closed_seed_satisfies_m_equality(self):
        swap = Hypersubstitution(SIG, (parse_term("f(x2,x1)", SIG),))
        M = generate_monoid([swap])
        bounds = Bounds(max_term_size=5)
        closed = m_hyper_closure(SIG, [COMM], M, bounds)
        cmp = compare_closures(
            SIG, closed.identities(), M,
            Bounds(max_term_size=5, variables=closed.pool),
        )
        assert cmp.e_equals_emh

    def test_commutativity_separates_e_from_eh(self):
        cmp = compare_closures(SIG, [COMM], None, Bounds(max_term_size=5, sigma_image_size=5))
        assert not cmp.e_equals_eh
        assert eq("x", "y") in cmp.eh
        assert eq("x", "y") not in cmp.e


class TestChainAndSoundness:
    def test_closure_chain_inclusion(self):
        rng = random.Random(5)
        swap = Hypersubstitution(SIG, (parse_term("f(x2,x1)", SIG),))
        M = generate_monoid([swap])
        for _ in range(10):
            seeds = [
                Equation(random_term(rng, SIG, ["x", "y"], 5), random_term(rng, SIG, ["x", "y"], 5))
                for _ in range(rng.randint(1, 2))
            ]
            bounds = Bounds(max_term_size=5, sigma_image_size=3, variables=("x", "y"))
            e = birkhoff_closure(SIG, seeds, bounds)
            m = m_hyper_closure(SIG, seeds, M, bounds)
            h = hyper_closure(SIG, seeds, bounds)
            for s, t in itertools.combinations(range(len(e.terms)), 2):
                pair = Equation(e.terms[s], e.terms[t])
                if pair in e:
                    assert pair in m
                if pair in m:
                    assert pair in h

    def test_soundness_against_models(self):
        rng = random.Random(9)
        for _ in range(6):
            seeds = [
                Equation(
                    random_term(rng, SIG, ["x", "y"], 5),
                    random_term(rng, SIG, ["x", "y"], 5),
                )
            ]
            bounds = Bounds(max_term_size=5, sigma_image_size=3, variables=("x", "y"))
            e_closure = birkhoff_closure(SIG, seeds, bounds)
            h_closure = hyper_closure(SIG, seeds, bounds)
            for _ in range(8):
                A = random_algebra(rng, SIG, rng.randint(2, 3))
                if all(check_identity(A, s).holds for s in seeds):
                    for identity in e_closure.identities():
                        assert check_identity(A, identity).holds
                if all(check_hyperidentity(A, s).holds for s in seeds):
                    for identity in h_closure.identities():
                        assert check_identity(A, identity).holds

    def test_idempotent_at_fixpoint(self):
        bounds = Bounds(max_term_size=5, variables=("x", "y"))
        c = birkhoff_closure(SIG, [COMM], bounds)
        again = birkhoff_closure(SIG, c.identities(), bounds)
        assert c.same_relation(again)

    def test_monotone_in_term_size_bound(self):
        small = birkhoff_closure(SIG, [IDEM], Bounds(max_term_size=5, variables=("x", "y")))
        large = birkhoff_closure(SIG, [IDEM], Bounds(max_term_size=7, variables=("x", "y")))
        for identity in small.identities():
            assert identity in large

    def test_unsaturated_when_step_budget_tiny(self):
        c = birkhoff_closure(SIG, [eq("x", "y")], Bounds(max_term_size=5, max_steps=2))
        assert not c.saturated
