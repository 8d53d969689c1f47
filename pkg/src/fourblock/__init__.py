"""Real 4x4 matrices in 2x2 block form, a catalog of 60 degenerate families
closed under multiplication, a membership classifier, and a verifier for the
ansatz solution tables behind the catalog."""

from .core import (
    FourVector,
    ImaginaryResidueError,
    ParamSet,
    block2,
    block2_to_fourvector,
    det_direct,
    det_paper,
    matrix_to_params,
    minkowski_form,
    multiply_blockwise,
    multiply_componentwise,
    numerical_rank,
    params_to_matrix,
)
from .families import (
    FAMILY_IDS,
    ClosureReport,
    FamilyDescriptor,
    FamilyParams,
    RankReport,
    catalog,
    claimed_rank_check,
    closure_check,
    construct,
    descriptor,
    membership_residual,
    random_member,
    random_scalars,
)
from .classifier import ClassificationReport, FamilyMatch, classify, report_to_dict
from .verifier import (
    VARIANT_TAGS,
    AnsatzVariant,
    FamilyCheck,
    ansatz_residual,
    build_member,
    families_of_variant,
    family_coefficients,
    solution_distance,
    summary_table,
    variant,
    verify_all,
    verify_constraint_system,
    verify_solution_table,
)

__version__ = "0.1.0"

__all__ = [
    "FourVector",
    "ImaginaryResidueError",
    "ParamSet",
    "block2",
    "block2_to_fourvector",
    "det_direct",
    "det_paper",
    "matrix_to_params",
    "minkowski_form",
    "multiply_blockwise",
    "multiply_componentwise",
    "numerical_rank",
    "params_to_matrix",
    "FAMILY_IDS",
    "ClosureReport",
    "FamilyDescriptor",
    "FamilyParams",
    "RankReport",
    "catalog",
    "claimed_rank_check",
    "closure_check",
    "construct",
    "descriptor",
    "membership_residual",
    "random_member",
    "random_scalars",
    "ClassificationReport",
    "FamilyMatch",
    "classify",
    "report_to_dict",
    "VARIANT_TAGS",
    "AnsatzVariant",
    "FamilyCheck",
    "ansatz_residual",
    "build_member",
    "families_of_variant",
    "family_coefficients",
    "solution_distance",
    "summary_table",
    "variant",
    "verify_all",
    "verify_constraint_system",
    "verify_solution_table",
    "__version__",
]
