"""Detectability of Gaussian anomalies under lossy compression.

Computes how rate-distortion-optimal and principal-component compression of
a Gaussian source degrade the distinguishability of anomalous covariances,
and validates the closed forms by seeded Monte Carlo experiments.
"""

from ._version import __version__
from .anomalies import (
    AnomalyModel,
    ConcentrationStats,
    concentration_stats,
    sample_anomaly,
    sample_haar_orthogonal,
    sample_simplex_eigenvalues,
    simplex_coordinate_expectation,
)
from .compress import (
    PccPlan,
    QuantizedBatch,
    QuantizerSpec,
    encode_pcc,
    gaussian_mi_estimate,
    pcc_distorted_pair,
    pcc_plan,
    quantize,
    quantizer_for_variances,
)
from .detectors import (
    DetectionResult,
    ScoredSample,
    auc,
    evaluate,
    ld_score,
    npd_score,
    psi,
)
from .experiment import (
    ExperimentConfig,
    ExperimentRecord,
    derive_seed,
    emit_concentration,
    emit_rd_curves,
    emit_theory_curves,
    run_experiment,
)
from .gaussian import (
    CovarianceSpec,
    ar1_covariance,
    localization,
    sample_covariance,
    sample_gaussian,
    solve_omega_for_localization,
)
from .metrics import (
    DistortedPair,
    cross_coding_rate,
    find_zeta_zero,
    kappa,
    kappa_white,
    zeta,
    zeta_white,
)
from .ratedist import (
    TestChannel,
    WaterFillSolution,
    distorted_anomaly_cov,
    distorted_normal_cov,
    encode_rdc,
    rd_point,
    rdc_distorted_pair,
    reverse_waterfill,
)

__all__ = [
    "__version__",
    "AnomalyModel",
    "ConcentrationStats",
    "CovarianceSpec",
    "DetectionResult",
    "DistortedPair",
    "ExperimentConfig",
    "ExperimentRecord",
    "PccPlan",
    "QuantizedBatch",
    "QuantizerSpec",
    "ScoredSample",
    "TestChannel",
    "WaterFillSolution",
    "ar1_covariance",
    "auc",
    "concentration_stats",
    "cross_coding_rate",
    "derive_seed",
    "distorted_anomaly_cov",
    "distorted_normal_cov",
    "emit_concentration",
    "emit_rd_curves",
    "emit_theory_curves",
    "encode_pcc",
    "encode_rdc",
    "evaluate",
    "find_zeta_zero",
    "gaussian_mi_estimate",
    "kappa",
    "kappa_white",
    "ld_score",
    "localization",
    "npd_score",
    "pcc_distorted_pair",
    "pcc_plan",
    "psi",
    "quantize",
    "quantizer_for_variances",
    "rd_point",
    "rdc_distorted_pair",
    "reverse_waterfill",
    "run_experiment",
    "sample_anomaly",
    "sample_covariance",
    "sample_gaussian",
    "sample_haar_orthogonal",
    "sample_simplex_eigenvalues",
    "simplex_coordinate_expectation",
    "solve_omega_for_localization",
    "zeta",
    "zeta_white",
]
