"""Fock-basis matrix elements of Gaussian unitaries and noisy Gaussian states.

Closed forms are built from two-variable Hermite-Kampé de Fériet
polynomials and checked against independent oracles: explicit factor
sums, the thermal series over the unitary's coefficients, Laguerre forms
and a brute-force truncated-operator simulation.
"""

from . import _validation
from ._validation import (
    ConditioningWarning,
    DomainError,
    IndexBoundsError,
    SeriesConvergenceWarning,
    SingularityError,
    max_index,
)
from .estimators import (
    FockDensityMatrix,
    GaussianUnitaryMatrix,
    PhotonNumberTransformer,
)
from .hlpoly import (
    gen_func_truncated,
    hkdf,
    hkdf2,
    hkdf2_normalized,
    hkdf2_rotation_degenerate,
    hkdf_degenerate,
    hkdf_degenerate_y,
    hkdf_vector,
    incomplete_hermite,
    laguerre_generalized,
    mehler_closed,
    mehler_series,
    mixed_deriv_quadexp,
)
from .oracle import build_unitary, matrix_exp, pad_dim_policy, rho_brute
from .state import (
    FactorMatrices,
    PhotonDistribution,
    StateDerived,
    StateParams,
    derive_state,
    displaced_helstrom_coeff,
    displaced_KW_coeff,
    factor_matrices,
    g_closed,
    g_series,
    k_entry,
    photon_distribution,
    pure_coeff,
    pure_state_vector,
    rho_coeff,
    rho_error_bound,
    rho_matrix,
    rho_series_coeff,
    rho_series_matrix,
    squeezed_special_coeff,
    thermal_coeff,
    w_entry,
)
from .unitary import (
    BosonicParams,
    OrderingParams,
    appendix_a_coeff,
    appendix_a_matrix,
    derive_ordering,
    displacement_laguerre_coeff,
    suggest_dim,
    unitary_block,
    unitary_coeff,
    unitary_error_estimate,
    unitary_matrix,
)

__version__ = "0.1.0"

__all__ = [
    name
    for name, value in dict(globals()).items()
    if not name.startswith("_") and not isinstance(value, type(_validation))
]
