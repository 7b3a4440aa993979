"""hyperq: a finite-model workbench for identities, quasi-identities,
hypersubstitutions, derived algebras, solidity checking and bounded
equational deduction."""

from .algebra import (
    CloneSlice,
    Environment,
    EvalError,
    FiniteAlgebra,
    TermOperation,
    derived_algebra,
    enumerate_term_operations,
    eval_term,
    load_algebra,
    parse_algebra,
    print_algebra,
    semantic_hsubs,
    term_operation,
)
from .hypersubst import (
    HsubMonoid,
    Hypersubstitution,
    apply_hsub,
    apply_hsub_equation,
    apply_hsub_quasi_identity,
    compose,
    generate_monoid,
    identity_hsub,
    load_hsubs,
    parse_hsub_file,
    print_hsub,
    trivial_monoid,
)
from .inference import (
    Bounds,
    ClosureSet,
    birkhoff_closure,
    compare_closures,
    hyper_closure,
    is_closed_under_rule6,
    m_hyper_closure,
)
from .satisfaction import (
    HyperVerdict,
    TheoryReport,
    Verdict,
    check_hyper_quasi_identity,
    check_hyperidentity,
    check_identity,
    check_quasi_identity,
    check_theory,
)
from .solidity import (
    SolidityReport,
    TheoremEntry,
    TheoremReport,
    check_solid,
    enumerate_derived_algebras,
    sweep_theorem,
    verify_theorem_4_1,
)
from .syntax import (
    App,
    Equation,
    ParseError,
    QuasiIdentity,
    Signature,
    Term,
    Theory,
    Var,
    load_theory,
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

__version__ = "0.1.0"
