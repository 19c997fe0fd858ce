"""Sampling and limit-law checks for beta-Laguerre and beta-Jacobi ensembles."""

__version__ = "0.1.0"

from .errors import InputError, NumericalRangeError, ParameterError
from .sampling import ChiSpec, RngStream, gamma_cdf, gamma_tail, sample_chi, sample_gamma
from .tridiag import (
    Bidiagonal,
    Spectrum,
    SymTridiagonal,
    eigenvalues,
    eigenvalues_dense,
    eigenvalues_ql,
    gershgorin_interval,
    gram_tridiagonal,
)
from .ensembles import (
    EnsembleParams,
    McmcConfig,
    log_density_jacobi,
    sample_jacobi_matrix,
    sample_jacobi_mcmc,
    sample_laguerre,
)
from .mp_law import MPLaw, moment
from .coupling import (
    RegimeReport,
    TvEstimate,
    check_regime,
    estimate_tv,
    log_kn_asymptotic,
    log_kn_exact,
    log_ln,
)
from .limit_stats import (
    AiryGrid,
    EdgeScalings,
    EmpiricalMeasure,
    clt_stat,
    edge_scalings,
    hard_edge_oracle,
    hard_edge_statistic,
    ks_distance,
    ks_two_sample,
    sample_airy_spectrum,
    scale_measure,
    soft_edge_statistic,
    wasserstein1,
)
