"""Exact-arithmetic cubic Jordan algebras: composition algebras, cubic
norm structures, Tits constructions, and constructive Skolem-Noether
machinery with exhaustive finite-field oracles."""

from .fields import GF, ExtensionField, PrimeField, Rationals
from .commalg import (
    CommAlgebra,
    CubicEtale,
    EtaleTensor,
    QuadraticEtale,
    discriminant_algebra,
    etale_from_poly,
    quadratic_etale_from_poly,
    split_cubic,
    split_quadratic,
    star_compose,
)
from .composition import CompositionAlgebra, cayley_dickson, zorn
from .cns import (
    CheckConfig,
    CubicNormStructure,
    IsotopyCertificate,
    QuadraticJordan,
    certify_map,
    compose_certificates,
    fundamental_formula_check,
    isotope_cns,
    jordan_from_cns,
    norm_composition_check,
    verify_cns_axioms,
)
from .constructions import (
    AssocAlgebra,
    DegreeThreeAlgebra,
    UnitaryDatum,
    aplus,
    degree_three_from_assoc,
    degree_three_from_cubic_etale,
    etale_tits_process,
    etale_unitary_datum,
    first_tits,
    h_b_tau,
    her3,
    mat3_assoc,
    mat3_degree_three,
    mat3_unitary_datum,
    normalize_u_map,
    second_tits,
    split_etale_mat3_identification,
    split_first_identification,
    twist_datum_map,
)
from .skolem import (
    Embedding,
    NormClass,
    extend_isomorphism,
    extend_isotopy,
    first_tits_equivalence,
    generated_subalgebra,
    initial_embedding,
    norm_class_of_twist,
    norm_class_witness_condition,
    norm_membership,
    norm_one_witness,
    second_generator_alpha,
    second_generator_element,
    cubic_subalgebra_etale,
    weak_equivalence_check,
)
from .structure_group import (
    GroupElementCertificate,
    outer_from_antiauto,
    special_unitary_group,
    sym3_operator,
    uw_operator,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
