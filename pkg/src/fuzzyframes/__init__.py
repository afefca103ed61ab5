"""fuzzyframes: frame and K-frame certificates for fuzzy inner product models.

The package realizes two concrete membership profiles over finite-dimensional
real or complex spaces, computes optimal frame / K-frame bounds spectrally,
builds atomic coefficient systems, transports certificates through operator
closures, and derives perturbation-stable bounds.  See README.md for the CLI
and the problem-file schema.
"""

__version__ = "1.0.0"

from .fuzzy_space import (
    BaseSpace,
    FuzzyModel,
    alpha_inner,
    alpha_inner_polarization,
    alpha_norm,
    alpha_norm_bisect,
    check_fip_axioms,
    fuzzy_norm_eval,
    mu_eval,
    orthonormal_check,
    orthonormal_expansion_check,
)
from .operator_algebra import (
    FactorizationResult,
    LinearOperator,
    PseudoInverseResult,
    RangeInclusionError,
    adjoint,
    alpha_operator_norm,
    douglas_factorize,
    douglas_lambda,
    douglas_range_inclusion,
    pencil_inf,
    pencil_sup,
    pseudo_inverse,
    psd_order_check,
    spectral_norm,
)
from .frame_core import (
    BoundCertificate,
    FrameFamily,
    FrameOperatorView,
    SingularFrameOperatorError,
    analysis_apply,
    atomic_coefficients,
    atomic_system_equivalence_check,
    atomic_system_from_operator,
    classical_frame_operator,
    frame_operator,
    frame_operator_view,
    frame_sum,
    optimal_frame_bounds,
    optimal_kframe_bounds,
    reconstruct,
    rescale_to_parseval,
    restricted_inverse_check,
    synthesis_matrix,
    verify_bounds,
)
from .frame_transforms import (
    DerivedBound,
    bessel_pair_kframe,
    build_family,
    combine_many,
    combine_product,
    combine_scalar,
    operator_transfer,
    synthesis_characterization,
    transform_family,
)
from .perturbation import (
    check_operator_perturbation,
    derive_family_perturbed_bounds,
    derive_operator_perturbed_bounds,
    family_perturbation_constant,
    frame_equivalence_constant,
    identity_perturbation_check,
)

__all__ = [
    "__version__",
    "BaseSpace",
    "FuzzyModel",
    "alpha_inner",
    "alpha_inner_polarization",
    "alpha_norm",
    "alpha_norm_bisect",
    "check_fip_axioms",
    "fuzzy_norm_eval",
    "mu_eval",
    "orthonormal_check",
    "orthonormal_expansion_check",
    "FactorizationResult",
    "LinearOperator",
    "PseudoInverseResult",
    "RangeInclusionError",
    "adjoint",
    "alpha_operator_norm",
    "douglas_factorize",
    "douglas_lambda",
    "douglas_range_inclusion",
    "pencil_inf",
    "pencil_sup",
    "pseudo_inverse",
    "psd_order_check",
    "spectral_norm",
    "BoundCertificate",
    "FrameFamily",
    "FrameOperatorView",
    "SingularFrameOperatorError",
    "analysis_apply",
    "atomic_coefficients",
    "atomic_system_equivalence_check",
    "atomic_system_from_operator",
    "classical_frame_operator",
    "frame_operator",
    "frame_operator_view",
    "frame_sum",
    "optimal_frame_bounds",
    "optimal_kframe_bounds",
    "reconstruct",
    "rescale_to_parseval",
    "restricted_inverse_check",
    "synthesis_matrix",
    "verify_bounds",
    "DerivedBound",
    "bessel_pair_kframe",
    "build_family",
    "combine_many",
    "combine_product",
    "combine_scalar",
    "operator_transfer",
    "synthesis_characterization",
    "transform_family",
    "check_operator_perturbation",
    "derive_family_perturbed_bounds",
    "derive_operator_perturbed_bounds",
    "family_perturbation_constant",
    "frame_equivalence_constant",
    "identity_perturbation_check",
]
