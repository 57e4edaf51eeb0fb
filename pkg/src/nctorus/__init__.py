"""Yang-Mills functionals on the noncommutative n-torus.

The package computes the Yang-Mills action of compatible connections on
finitely generated projective modules over the truncated smooth torus algebra,
in both the derivation-based and the Dirac-form-based formulations, and checks
their agreement up to the explicit normalizing constant.
"""

__version__ = "0.1.0"

from .torus import (
    AlgebraMismatch,
    ConvergenceFailure,
    DeformationMatrix,
    DimensionMismatch,
    TorusAlgebra,
    TorusElement,
    TorusError,
    TruncationOverflow,
    TruncationPolicy,
    adjoint,
    delta,
    delta_tilde,
    l1_norm,
    linear_combine,
    mul,
    trace_tau,
    weyl_phase,
)
from .clifford import CliffordRep, gamma_generate, mat_trace_normalized
from .matrices import (
    ModuleVector,
    TorusMatrix,
    canonical_pairing,
    hermitian_normalize,
    idempotent_to_projection,
    is_projection,
    mat_l1_norm,
    newton_inverse,
    newton_sqrt,
    tau_q,
)
from .connections import (
    Connection,
    ConventionError,
    CurvatureForm,
    ProjectiveModule,
    check_compatibility,
    connection_apply,
    curvature,
    free_module,
    grassmannian,
    hermitian_pairing,
    module_new,
    phi_inverse,
    phi_map,
    ym_dynamical,
)
from .forms import (
    CrossCheckError,
    OmegaD1Element,
    OmegaD2Element,
    SpectralCurvature,
    curvature_spectral,
    d0,
    d1,
    dixmier_constant,
    omega1_product,
    omega2_inner,
    pi_represent,
    project_junk,
    sigma_basis,
    ym_spectral,
    ym_spectral_report,
)
from .descent import (
    DescentParams,
    DescentTrace,
    fd_directional,
    gradient_inner,
    gradient_norm,
    minimize_ym,
    ym_gradient,
    ym_of_potentials,
)
