"""Numerical laboratory for heat-kernel nets on PU(d).

Submodules: lie_core (group data, torus points), weights_chars (projective
weights and characters), kernels (character and lattice kernel forms),
bounds (closed-form sufficiency bounds), montecarlo (sampling estimators
and torus quadrature), design_tester (moment operators and delta), cli
(command-line entry point).
"""

from __future__ import annotations

from .bounds import (
    AuxReport,
    BoundReport,
    application1_ell,
    aux_inequalities_check,
    bound_I0,
    bound_L1_trimmed,
    bound_L2,
    bound_L2_simple,
    bound_R,
    bound_outside_ball,
    bound_trim,
    eta_min,
    kappa,
    ratio_R_over_I0_ok,
    sigma_star,
    t_star,
    theorem1_t_min,
    theorem2_delta_max,
    volume_lower_bound,
)
from .cli import RunConfig, main
from .design_tester import (
    DEFAULT_DIM_CAP,
    MomentOperator,
    NetProbeReport,
    ResourceLimitError,
    WeightedGateSet,
    delta_design,
    gate_set_from_json,
    gate_set_to_json,
    haar_moment_projector,
    measure_moment,
    net_probe,
)
from .kernels import (
    EvalResult,
    KernelParams,
    NumericalInstabilityError,
    TruncationError,
    heat_pu_char,
    heat_pu_char_batch,
    heat_pu_poisson,
    heat_su_char,
    heat_su_char_batch,
    heat_su_poisson,
    l2_norm_trimmed,
    l2_norm_untrimmed,
    trimming_error,
)
from .lie_core import (
    GroupConstants,
    InvalidDimensionError,
    InvalidParameterError,
    TorusPoint,
    eps_tilde,
    group_constants,
    killing_norm_sq,
    log_prefactor,
    weyl_vector_diag,
)
from .montecarlo import (
    McEstimate,
    RngStream,
    gue_opnorm_cdf,
    gue_tail_mc,
    mc_normalization,
    mc_outside_ball,
    mc_outside_ball_su,
    numeric_I0,
    projective_distance,
    sample_gue_traceless,
    sample_haar_su,
    torus_grid,
    torus_quadrature,
)
from .weights_chars import (
    HighestWeight,
    casimir,
    center_average_character,
    character,
    dim,
    enumerate_projective_weights,
    enumerate_su_labels,
    j_function,
)

__version__ = "0.1.0"

__all__ = [
    "AuxReport",
    "BoundReport",
    "DEFAULT_DIM_CAP",
    "EvalResult",
    "GroupConstants",
    "HighestWeight",
    "InvalidDimensionError",
    "InvalidParameterError",
    "KernelParams",
    "McEstimate",
    "MomentOperator",
    "NetProbeReport",
    "NumericalInstabilityError",
    "ResourceLimitError",
    "RngStream",
    "RunConfig",
    "TorusPoint",
    "TruncationError",
    "WeightedGateSet",
    "application1_ell",
    "aux_inequalities_check",
    "bound_I0",
    "bound_L1_trimmed",
    "bound_L2",
    "bound_L2_simple",
    "bound_R",
    "bound_outside_ball",
    "bound_trim",
    "casimir",
    "center_average_character",
    "character",
    "delta_design",
    "dim",
    "enumerate_projective_weights",
    "enumerate_su_labels",
    "eps_tilde",
    "eta_min",
    "gate_set_from_json",
    "gate_set_to_json",
    "group_constants",
    "gue_opnorm_cdf",
    "gue_tail_mc",
    "haar_moment_projector",
    "heat_pu_char",
    "heat_pu_char_batch",
    "heat_pu_poisson",
    "heat_su_char",
    "heat_su_char_batch",
    "heat_su_poisson",
    "j_function",
    "kappa",
    "killing_norm_sq",
    "l2_norm_trimmed",
    "l2_norm_untrimmed",
    "log_prefactor",
    "main",
    "mc_normalization",
    "mc_outside_ball",
    "mc_outside_ball_su",
    "measure_moment",
    "net_probe",
    "numeric_I0",
    "projective_distance",
    "ratio_R_over_I0_ok",
    "sample_gue_traceless",
    "sample_haar_su",
    "sigma_star",
    "t_star",
    "theorem1_t_min",
    "theorem2_delta_max",
    "torus_grid",
    "torus_quadrature",
    "trimming_error",
    "volume_lower_bound",
    "weyl_vector_diag",
]
