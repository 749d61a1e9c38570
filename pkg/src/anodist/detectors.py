"""Analytic detectors on compressed instances and rank-based evaluation.

Two detectors, both closed-form Gaussian scores on the surviving subspace:

* LD knows only the normal model and scores by coding cost (negative
  log-likelihood, bits);
* NPD knows both models and scores by the log-likelihood ratio.

Detection quality is summarized by the Mann-Whitney AUC and its folded
version psi = max(AUC, 1 - AUC).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .gaussian import CovarianceSpec
from .metrics import DistortedPair

__all__ = [
    "DETECTOR_NAMES",
    "ScoredSample",
    "DetectionResult",
    "ld_score",
    "npd_score",
    "auc",
    "psi",
    "sample_pair_instances",
    "evaluate",
]

_TWO_LN2 = 2.0 * math.log(2.0)

DETECTOR_NAMES = ("ld", "npd")


class ScoredSample(NamedTuple):
    score: float
    anomalous: bool


@dataclass(frozen=True)
class DetectionResult:
    """AUC and folded AUC of one detector on one compressed pair."""

    auc: float
    psi: float
    n_ok: int
    n_ko: int
    degenerate: bool = False


def _quad_form(x: np.ndarray, cov: CovarianceSpec) -> np.ndarray:
    """x' cov^-1 x per row, via the eigenbasis of cov."""
    projected = x @ cov.basis
    return kernels.weighted_sumsq_rows(projected, 1.0 / cov.eigenvalues)


def _check_pd(cov: CovarianceSpec, name: str) -> None:
    if cov.eigenvalues[-1] <= 0.0:
        raise ValueError(f"{name} must be strictly positive definite")


def ld_score(x_hat, hat_ok: CovarianceSpec):
    """Coding cost -log2 f_ok(x_hat) in bits, on the surviving components.

    Accepts a single vector or a (count, m) batch.
    """
    _check_pd(hat_ok, "hat_ok")
    x = np.asarray(x_hat, dtype=float)
    single = x.ndim == 1
    rows = np.atleast_2d(x)
    if rows.shape[1] != hat_ok.dim:
        raise ValueError("instance dimension does not match hat_ok")
    const = hat_ok.dim * math.log(2.0 * math.pi) + float(np.sum(np.log(hat_ok.eigenvalues)))
    scores = (const + _quad_form(rows, hat_ok)) / _TWO_LN2
    return float(scores[0]) if single else scores


def npd_score(x_hat, hat_ok: CovarianceSpec, hat_ko: CovarianceSpec):
    """Log-likelihood ratio log2 f_ko(x_hat) - log2 f_ok(x_hat) in bits."""
    _check_pd(hat_ok, "hat_ok")
    _check_pd(hat_ko, "hat_ko")
    if hat_ok.dim != hat_ko.dim:
        raise ValueError("block dimensions differ")
    x = np.asarray(x_hat, dtype=float)
    single = x.ndim == 1
    rows = np.atleast_2d(x)
    if rows.shape[1] != hat_ok.dim:
        raise ValueError("instance dimension does not match the blocks")
    log_det_gap = float(np.sum(np.log(hat_ok.eigenvalues)) - np.sum(np.log(hat_ko.eigenvalues)))
    scores = (log_det_gap + _quad_form(rows, hat_ok) - _quad_form(rows, hat_ko)) / _TWO_LN2
    return float(scores[0]) if single else scores


def auc(scores_ok, scores_ko) -> float:
    """Mann-Whitney AUC: P(ko score > ok score) with ties counted half."""
    ok = np.asarray(scores_ok, dtype=float)
    ko = np.asarray(scores_ko, dtype=float)
    if ok.size == 0 or ko.size == 0:
        raise ValueError("both score sequences must be non-empty")
    if not (np.all(np.isfinite(ok)) and np.all(np.isfinite(ko))):
        raise ValueError("scores must be finite")
    return kernels.mann_whitney_auc(ok, ko)


def psi(auc_value: float) -> float:
    """Folded AUC: below-chance detectors are as informative as their mirror."""
    if not 0.0 <= auc_value <= 1.0:
        raise ValueError(f"auc must be in [0, 1], got {auc_value}")
    return auc_value if auc_value >= 0.5 else 1.0 - auc_value


def sample_pair_instances(
    pair: DistortedPair, n_ok: int, n_ko: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Fresh instance batches from the two compressed laws (ok first)."""
    if pair.n_theta == 0:
        raise ValueError("degenerate pair has no instances to sample")
    ok_cov, ko_cov = pair.hat_ok, pair.hat_ko
    z = rng.standard_normal((n_ok, ok_cov.dim))
    y_ok = (z * np.sqrt(ok_cov.eigenvalues)) @ ok_cov.basis.T
    w = rng.standard_normal((n_ko, ko_cov.dim))
    y_ko = (w * np.sqrt(ko_cov.eigenvalues)) @ ko_cov.basis.T
    return y_ok, y_ko


def score_batch(detector: str, pair: DistortedPair, instances: np.ndarray) -> np.ndarray:
    """Apply one named detector to a batch drawn from either law."""
    if detector == "ld":
        return ld_score(instances, pair.hat_ok)
    if detector == "npd":
        return npd_score(instances, pair.hat_ok, pair.hat_ko)
    raise ValueError(f"unknown detector {detector!r}; expected one of {DETECTOR_NAMES}")


def evaluate(
    detector: str,
    pair: DistortedPair,
    n_ok: int,
    n_ko: int,
    rng: np.random.Generator,
) -> DetectionResult:
    """Sample both laws, score them, and report AUC and psi.

    A degenerate pair (nothing survives compression) carries no information
    and is reported as exact chance with the degenerate flag set.
    """
    if detector not in DETECTOR_NAMES:
        raise ValueError(f"unknown detector {detector!r}; expected one of {DETECTOR_NAMES}")
    if n_ok < 2 or n_ko < 2:
        raise ValueError("instance counts must be at least 2")
    if pair.n_theta == 0:
        return DetectionResult(auc=0.5, psi=0.5, n_ok=n_ok, n_ko=n_ko, degenerate=True)
    y_ok, y_ko = sample_pair_instances(pair, n_ok, n_ko, rng)
    auc_value = auc(score_batch(detector, pair, y_ok), score_batch(detector, pair, y_ko))
    return DetectionResult(auc=auc_value, psi=psi(auc_value), n_ok=n_ok, n_ko=n_ko)
