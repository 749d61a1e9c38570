"""Reverse water-filling for Gaussian sources and the optimal test channel.

The water level theta splits the spectrum into surviving components
(lambda_j > theta, distorted by a factor tau_j = theta/lambda_j) and dead
ones (tau_j = 1, output exactly zero).  All rates are in bits per vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian import CovarianceSpec
from .metrics import DistortedPair

__all__ = [
    "WaterFillSolution",
    "TestChannel",
    "reverse_waterfill",
    "rd_point",
    "distorted_normal_cov",
    "distorted_anomaly_cov",
    "encode_rdc",
    "rdc_distorted_pair",
]


def _check_spectrum(eigenvalues) -> np.ndarray:
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("eigenvalues must be a non-empty 1-d sequence")
    if np.any(np.diff(lam) > 0):
        raise ValueError("eigenvalues must be sorted descending")
    if lam[-1] < 0.0:
        raise ValueError("eigenvalues must be non-negative")
    if lam[0] <= 0.0:
        raise ValueError("at least one eigenvalue must be positive")
    return lam


def _retention(lam: np.ndarray, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """(tau, s) with tau_j = min(1, theta/lambda_j), s = 1 - tau.

    Dead components get tau exactly 1 and s exactly 0, which is what makes
    their encoded output an exact zero rather than a rounding-level one.
    """
    tau = np.divide(theta, lam, out=np.ones_like(lam), where=lam > theta)
    return tau, 1.0 - tau


@dataclass(frozen=True)
class WaterFillSolution:
    """One operating point of the Gaussian rate-distortion curve."""

    theta: float
    tau: np.ndarray
    s: np.ndarray
    n_theta: int
    rate_bits: float
    distortion: float


@dataclass(frozen=True)
class TestChannel:
    """The rate-achieving stochastic encoder x -> N(S x, Sigma S T).

    Works in the source eigenbasis: the gain is diag(s) and the additive
    noise has per-component variance lambda_j * tau_j * s_j.
    """

    source: CovarianceSpec
    solution: WaterFillSolution

    def __post_init__(self):
        if self.source.dim != self.solution.tau.size:
            raise ValueError("source and solution dimensions differ")

    @property
    def noise_variances(self) -> np.ndarray:
        return self.source.eigenvalues * self.solution.tau * self.solution.s

    @property
    def distorted_eigenvalues(self) -> np.ndarray:
        return np.maximum(self.source.eigenvalues - self.solution.theta, 0.0)


def reverse_waterfill(eigenvalues, delta: float) -> WaterFillSolution:
    """Solve sum_j min(theta, lambda_j) = delta for the water level theta.

    The distortion is piecewise linear in theta with kinks at the
    eigenvalues, so the exact solution comes from sorting the kinks and
    inverting the right linear segment; no iterative solve is involved.
    """
    lam = _check_spectrum(eigenvalues)
    n = lam.size
    total = float(np.sum(lam))
    if delta <= 0.0:
        raise ValueError("delta must be positive (zero distortion means infinite rate)")
    if delta > total * (1.0 + 1e-12):
        raise ValueError(f"delta {delta} exceeds the total source power {total}")
    delta = min(delta, total)

    asc = lam[::-1]
    prefix = 0.0
    theta = asc[-1]
    for i in range(n):
        cand = (delta - prefix) / (n - i)
        if cand <= asc[i]:
            theta = cand
            break
        prefix += asc[i]

    tau, s = _retention(lam, theta)
    active = lam > theta
    rate = -0.5 * float(np.sum(np.log2(tau[active]))) if np.any(active) else 0.0
    achieved = float(np.sum(np.minimum(theta, lam)))
    return WaterFillSolution(
        theta=float(theta),
        tau=tau,
        s=s,
        n_theta=int(np.count_nonzero(active)),
        rate_bits=rate,
        distortion=achieved,
    )


def rd_point(eigenvalues, theta: float) -> tuple[float, float]:
    """Rate (bits) and distortion at a given water level.

    theta = 0 is the no-distortion corner where the rate of a continuous
    source is unbounded; it is reported as math.inf rather than rejected so
    curve emitters can represent the corner explicitly.
    """
    lam = _check_spectrum(eigenvalues)
    if theta < 0.0 or theta > lam[0]:
        raise ValueError(f"theta must be in [0, {lam[0]}], got {theta}")
    if theta == 0.0:
        return math.inf, 0.0
    tau, _ = _retention(lam, theta)
    active = lam > theta
    rate = -0.5 * float(np.sum(np.log2(tau[active]))) if np.any(active) else 0.0
    return rate, float(np.sum(np.minimum(theta, lam)))


def distorted_normal_cov(source: CovarianceSpec, theta: float) -> CovarianceSpec:
    """Covariance of the encoded normal signal: diag(max(0, lambda_j - theta))."""
    lam = source.eigenvalues
    if theta < 0.0 or theta > lam[0]:
        raise ValueError(f"theta must be in [0, {lam[0]}], got {theta}")
    return CovarianceSpec(np.maximum(lam - theta, 0.0), source.basis)


def _conjugate_into_source_basis(anomaly: CovarianceSpec, source: CovarianceSpec) -> np.ndarray:
    if anomaly.dim != source.dim:
        raise ValueError("anomaly and source dimensions differ")
    u = source.basis
    return u.T @ anomaly.matrix @ u


def _distorted_anomaly_matrix(anomaly: CovarianceSpec, source: CovarianceSpec, theta: float) -> np.ndarray:
    lam = source.eigenvalues
    if theta < 0.0 or theta > lam[0]:
        raise ValueError(f"theta must be in [0, {lam[0]}], got {theta}")
    conj = _conjugate_into_source_basis(anomaly, source)
    _, s = _retention(lam, theta)
    return s[:, None] * conj * s[None, :] + theta * np.diag(s)


def distorted_anomaly_cov(anomaly: CovarianceSpec, source: CovarianceSpec, theta: float) -> CovarianceSpec:
    """Covariance of the anomalous signal after the normal-optimal encoder.

    The anomaly arrives in world coordinates and is conjugated into the
    source eigenbasis here; the result S Sigma_ko S + theta S is expressed
    in that eigenbasis, with the surviving block in the leading corner.
    """
    return CovarianceSpec.from_matrix(_distorted_anomaly_matrix(anomaly, source, theta))


def encode_rdc(x, channel: TestChannel, rng: np.random.Generator) -> np.ndarray:
    """Push instances (expressed in the source eigenbasis) through the channel.

    Accepts a single vector or a batch with trailing dimension n.  Dead
    components come out exactly zero.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != channel.source.dim:
        raise ValueError("instance dimension does not match the channel")
    noise = rng.standard_normal(x.shape) * np.sqrt(channel.noise_variances)
    return channel.solution.s * x + noise


def rdc_distorted_pair(source: CovarianceSpec, anomaly: CovarianceSpec, theta: float) -> DistortedPair:
    """Surviving-subspace covariance pair after rate-distortion encoding.

    Both blocks live in the leading n_theta coordinates of the source
    eigenbasis.  A water level at or above lambda_0 kills every component
    and yields the degenerate pair (no surviving subspace).
    """
    lam = source.eigenvalues
    if theta < 0.0 or theta > lam[0]:
        raise ValueError(f"theta must be in [0, {lam[0]}], got {theta}")
    m = int(np.count_nonzero(lam > theta))
    if m == 0:
        return DistortedPair(hat_ok=None, hat_ko=None, n_theta=0)
    hat_ok = CovarianceSpec((lam - theta)[:m], np.eye(m))
    hat_ko = CovarianceSpec.from_matrix(_distorted_anomaly_matrix(anomaly, source, theta)[:m, :m])
    return DistortedPair(hat_ok=hat_ok, hat_ko=hat_ko, n_theta=m)
