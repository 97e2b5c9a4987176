"""Random-walk Metropolis and pCN kernels with explicit isoperimetric convergence bounds."""

from .bounds import (
    BoundPair,
    BoundReport,
    CloseCoupling,
    conductance_profile_lower,
    conductance_star_lower,
    gauss_sandwich,
    mixing_time_iso,
    mixing_time_profile,
    mixing_time_profile_bound,
    pcn_alpha0_lower,
    pcn_close_coupling,
    pcn_eta,
    pcn_lower_bounds,
    pcn_mixing_time,
    pcn_optimized_gap_floor,
    pcn_step_size_infimum,
    rwm_alpha0_lower,
    rwm_alpha0_lower_general,
    rwm_asvar_bounds,
    rwm_close_coupling,
    rwm_lower_bounds,
    rwm_lower_bounds_general,
    rwm_mixing_time,
    rwm_sigma,
    rwm_upper_bounds,
    spectral_gap_lower,
    spectral_profile_lower,
    tv_proposal_bound,
    v_star,
    warm_start_u0,
)
from .errors import InvalidArgument, InvalidConfig, NumericalFailure
from .estimators import (
    EstimateWithError,
    acceptance_rate,
    chi2_gaussian_diag,
    coordinate,
    dimension_scan,
    halfspace_flow,
    linear,
    rayleigh_quotient,
)
from .isoperimetry import (
    C_ELL,
    C_GAMMA,
    CONSTANTS,
    IsoMinorant,
    UniversalConstants,
    density_perturbation,
    gaussian_profile,
    inv_normal_cdf,
    laplace_profile,
    lipschitz_pushforward,
    log_power_minorant,
    minorant_from_logsobolev,
    minorant_from_poincare,
    osc_perturbation,
    strongly_logconcave_log_minorant,
    strongly_logconcave_minorant,
    subbotin_minorant,
    three_set_lower,
)
from .quadrature import adaptive_quadrature, chi_expectation
from .rng import CounterRNG
from .samplers import (
    ChainStats,
    KernelConfig,
    accepted_proposal_init,
    gaussian_sample,
    kernel_step_batch,
    mode_gaussian_init,
    pcn_gaussian_init,
    pcn_init_cov,
    pcn_step,
    run_chain,
    rwm_step,
)
from .targets import (
    PcnTarget,
    TargetSpec,
    check_smooth_convex,
    diagonal_gaussian_target,
    gaussian_target,
    load_logistic_csv,
    logistic_posterior_target,
    pcn_quadratic_target,
)

__version__ = "0.1.0"
