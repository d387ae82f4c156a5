"""Exact-arithmetic toolkit for isoparametric hypersurfaces of OT-FKM type.

The package builds Clifford systems and their Cartan-Munzner quartics,
computes second and third fundamental forms at focal-manifold points in
exact arithmetic, solves for Ozeki-Takeuchi Condition B witnesses, detects
Condition A points, certifies regular sequences through Groebner-basis
dimension counts, and reduces shape-operator pencils to simultaneous
normal form.
"""

__version__ = "0.1.0"

from .clifford import (
    CliffordSystem,
    CMQuartic,
    build_clifford_system,
    builtin_catalog,
    fkm_polynomial,
    load_instance,
    verify_cartan_munzner,
)
from .conditions import (
    ConditionBFailure,
    ConditionBWitness,
    condition_a_at,
    condition_b_solve,
    find_condition_a_points,
    normalize_and_check_antisym,
)
from .fields import GAUSSIAN, QQ, PrimeField, QuadraticField
from .focalgeom import (
    FocalFrame,
    FormSet,
    build_frame,
    find_focal_point,
    iter_focal_frames,
    second_forms,
    shape_operators,
    span_check,
    third_forms,
)
from .idealcheck import (
    GroebnerBasis,
    IdealReport,
    corollary1_pipeline,
    groebner,
    ideal_dimension,
    is_regular_sequence,
    jacobian_locus,
    primeness_criterion,
    sequence_is_regular,
)
from .pencilform import (
    PencilNormalForm,
    lemma49_normal_form,
    pencil_kernel_dimension,
    sample_singular_stratification,
)
from .poly import Polynomial, PolyMatrix, focal_names

__all__ = [
    "CliffordSystem",
    "CMQuartic",
    "ConditionBFailure",
    "ConditionBWitness",
    "FocalFrame",
    "FormSet",
    "GAUSSIAN",
    "GroebnerBasis",
    "IdealReport",
    "PencilNormalForm",
    "PolyMatrix",
    "Polynomial",
    "PrimeField",
    "QQ",
    "QuadraticField",
    "build_clifford_system",
    "build_frame",
    "builtin_catalog",
    "condition_a_at",
    "condition_b_solve",
    "corollary1_pipeline",
    "find_condition_a_points",
    "find_focal_point",
    "fkm_polynomial",
    "focal_names",
    "groebner",
    "ideal_dimension",
    "is_regular_sequence",
    "iter_focal_frames",
    "jacobian_locus",
    "lemma49_normal_form",
    "load_instance",
    "normalize_and_check_antisym",
    "pencil_kernel_dimension",
    "primeness_criterion",
    "sample_singular_stratification",
    "second_forms",
    "sequence_is_regular",
    "shape_operators",
    "span_check",
    "third_forms",
    "verify_cartan_munzner",
]
