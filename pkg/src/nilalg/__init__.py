"""Exact arithmetic for nilpotent Lie algebras: filtrations and adapted
bases, the group law in exponential coordinates, enveloping-algebra
prenorms, homogeneous gauges, and word-length geometry, all over the
rationals with certified interval enclosures where roots appear."""

from .algebra import (
    FBasis,
    Filtration,
    LayerDecomposition,
    LieAlgebra,
    ValidationReport,
    abelian,
    algebra_from_json,
    algebra_to_json,
    bracket,
    check_filtration,
    f_basis,
    heisenberg,
    layer_decomposition,
    load_algebra,
    lower_central_series,
    validate,
    weight_of,
)
from .enveloping import (
    DecayProfile,
    EntiretyReport,
    PrenormParams,
    UElement,
    WeightSequence,
    decay_profile,
    dp_counts,
    entire_check,
    growth_function,
    mul_continuity_probe,
    pbw_mul,
    power_norm_closed_form,
    prenorm,
    u_gen,
    u_monomial,
    u_one,
    u_power,
    u_zero,
    uelement_from_json,
    weight_axiom_check,
)
from .errors import (
    InfeasibleSchemeError,
    NilalgError,
    NotNilpotentError,
    PrecisionExhaustedError,
    SearchExhaustedError,
    StructuralError,
)
from .geometry import (
    CommutatorScheme,
    Dilation,
    EquivalenceReport,
    NormSpec,
    adapted_norm,
    ball_bound_check,
    build_commutator_scheme,
    corcbh_c_target,
    dilate,
    exp_type_norm,
    poly_from_json,
    scheme_base_length,
    sigma,
    sigma_bar,
    subpoly_estimate,
    word_factorize,
)
from .group import (
    GroupElement,
    bch,
    bch_naive,
    exp_of_word,
    first_to_second,
    group_inv,
    group_mul,
    merge_letters,
    second_to_first,
    word_from_json,
    word_to_json,
)
from .intervals import Iv, decimal_str, e_iv, exp_iv, nth_root, pow_int, round_iv
from .scalars import Scalar, parse_scalar, rat, rat_str, scalar_str

__version__ = "0.1.0"

__all__ = [
    "FBasis",
    "Filtration",
    "LayerDecomposition",
    "LieAlgebra",
    "ValidationReport",
    "abelian",
    "algebra_from_json",
    "algebra_to_json",
    "bracket",
    "check_filtration",
    "f_basis",
    "heisenberg",
    "layer_decomposition",
    "load_algebra",
    "lower_central_series",
    "validate",
    "weight_of",
    "DecayProfile",
    "EntiretyReport",
    "PrenormParams",
    "UElement",
    "WeightSequence",
    "decay_profile",
    "dp_counts",
    "entire_check",
    "growth_function",
    "mul_continuity_probe",
    "pbw_mul",
    "power_norm_closed_form",
    "prenorm",
    "u_gen",
    "u_monomial",
    "u_one",
    "u_power",
    "u_zero",
    "uelement_from_json",
    "weight_axiom_check",
    "InfeasibleSchemeError",
    "NilalgError",
    "NotNilpotentError",
    "PrecisionExhaustedError",
    "SearchExhaustedError",
    "StructuralError",
    "CommutatorScheme",
    "Dilation",
    "EquivalenceReport",
    "NormSpec",
    "adapted_norm",
    "ball_bound_check",
    "build_commutator_scheme",
    "corcbh_c_target",
    "dilate",
    "exp_type_norm",
    "poly_from_json",
    "scheme_base_length",
    "sigma",
    "sigma_bar",
    "subpoly_estimate",
    "word_factorize",
    "GroupElement",
    "bch",
    "bch_naive",
    "exp_of_word",
    "first_to_second",
    "group_inv",
    "group_mul",
    "merge_letters",
    "second_to_first",
    "word_from_json",
    "word_to_json",
    "Iv",
    "decimal_str",
    "e_iv",
    "exp_iv",
    "nth_root",
    "pow_int",
    "round_iv",
    "Scalar",
    "parse_scalar",
    "rat",
    "rat_str",
    "scalar_str",
]
