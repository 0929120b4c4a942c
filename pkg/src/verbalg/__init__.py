"""Many-sorted universal algebra: finite models, verbal operations and closures."""
from .signature import Identity, OpType, Signature, VarietySpec, validate_signature, validate_variety
from .terms import App, Var, enumerate_terms, mk_app, mk_var, substitute, vars_of
from .finite import (
    BudgetExceeded,
    FiniteAlgebra,
    enumerate_homs,
    generated_subalgebra,
    in_variety,
    is_embedding,
    is_homomorphism,
    make_algebra,
    product_algebra,
    satisfies_identity,
)
from .freeforms import free_elements_up_to, nf_equal, nf_eval
from .verbal import (
    WordSystem,
    check_b_conditions,
    check_derived_in_variety,
    derive_algebra,
    induced_s,
    make_word_system,
    naturality_check,
    verbal_apply,
)
from .closure import (
    ClosedCongruence,
    EquationSystem,
    closure_equal,
    closure_member,
    geom_equivalent,
    is_closed,
    kernel_of,
    solutions,
    transport_closure,
)
from .search import (
    SearchConfig,
    auto_equivalent,
    classify_strongly_stable,
    counterexample_search,
    enumerate_word_systems,
)
from .textio import ParseError, parse_algebra, parse_system, parse_variety, parse_words

__version__ = "0.1.0"

__all__ = [
    "App",
    "BudgetExceeded",
    "ClosedCongruence",
    "EquationSystem",
    "FiniteAlgebra",
    "Identity",
    "OpType",
    "ParseError",
    "SearchConfig",
    "Signature",
    "Var",
    "VarietySpec",
    "WordSystem",
    "auto_equivalent",
    "check_b_conditions",
    "check_derived_in_variety",
    "classify_strongly_stable",
    "closure_equal",
    "closure_member",
    "counterexample_search",
    "derive_algebra",
    "enumerate_homs",
    "enumerate_terms",
    "enumerate_word_systems",
    "free_elements_up_to",
    "generated_subalgebra",
    "geom_equivalent",
    "in_variety",
    "induced_s",
    "is_closed",
    "is_embedding",
    "is_homomorphism",
    "kernel_of",
    "make_algebra",
    "make_word_system",
    "mk_app",
    "mk_var",
    "naturality_check",
    "nf_equal",
    "nf_eval",
    "parse_algebra",
    "parse_system",
    "parse_variety",
    "parse_words",
    "product_algebra",
    "satisfies_identity",
    "solutions",
    "substitute",
    "transport_closure",
    "validate_signature",
    "validate_variety",
    "vars_of",
    "verbal_apply",
]
