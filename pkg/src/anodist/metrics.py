"""Distinguishability metrics between compressed normal and anomalous laws.

All quantities are in bits.  The two core metrics are

* ``zeta``: the excess average coding rate paid when anomalous traffic is
  compressed with the code optimized for normal traffic (sign-indefinite,
  its magnitude is the anomaly-agnostic detectability proxy), and
* ``kappa``: the symmetrized Kullback-Leibler divergence between the two
  compressed laws (non-negative, anomaly-aware).

The ``*_white`` variants specialize to the identity-covariance anomaly,
which is both the mean of the anomaly ensemble and its large-n limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian import CovarianceSpec

__all__ = [
    "DistortedPair",
    "cross_coding_rate",
    "zeta",
    "kappa",
    "zeta_white",
    "kappa_white",
    "find_zeta_zero",
]

_TWO_LN2 = 2.0 * math.log(2.0)
_SIMILARITY_FLOOR = 1e-12


@dataclass(frozen=True)
class DistortedPair:
    """Post-compression covariances restricted to the surviving subspace.

    ``hat_ok`` must be strictly positive definite.  When the compressor
    kills every component (n_theta = 0) there is no surviving subspace and
    both blocks are None; detectors treat that case as pure chance.
    """

    hat_ok: CovarianceSpec | None
    hat_ko: CovarianceSpec | None
    n_theta: int

    def __post_init__(self):
        if self.n_theta == 0:
            if self.hat_ok is not None or self.hat_ko is not None:
                raise ValueError("degenerate pair must have empty blocks")
            return
        if self.hat_ok is None or self.hat_ko is None:
            raise ValueError("non-degenerate pair needs both covariance blocks")
        if self.hat_ok.dim != self.n_theta or self.hat_ko.dim != self.n_theta:
            raise ValueError("block dimensions do not match n_theta")
        if self.hat_ok.eigenvalues[-1] <= 0.0:
            raise ValueError("hat_ok must be strictly positive definite")


def _as_spec(cov) -> CovarianceSpec:
    if isinstance(cov, CovarianceSpec):
        return cov
    arr = np.asarray(cov, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = np.diag(arr)
    return CovarianceSpec.from_matrix(arr)


def cross_coding_rate(sigma_prime, sigma_dprime) -> float:
    """Average rate (bits/vector) of coding N(0, sigma') with the code for N(0, sigma'').

    Scalars and 1-d variance sequences are promoted to diagonal matrices.
    With sigma' = sigma'' this is the differential entropy of the source.
    """
    prime = _as_spec(sigma_prime)
    dprime = _as_spec(sigma_dprime)
    if prime.dim != dprime.dim:
        raise ValueError("covariance dimensions differ")
    if dprime.eigenvalues[-1] <= 0.0:
        raise ValueError("the coding covariance must be positive definite")
    n = prime.dim
    quad = np.einsum("ji,jk,ki->i", dprime.basis, prime.matrix, dprime.basis)
    trace_term = float(np.sum(quad / dprime.eigenvalues))
    log_det = float(np.sum(np.log(dprime.eigenvalues)))
    return (n * math.log(2.0 * math.pi) + log_det + trace_term) / _TWO_LN2


def zeta(pair: DistortedPair) -> float:
    """Trace form (1 / 2ln2) tr(hat_ok^-1 hat_ko - I) on the surviving block."""
    if pair.n_theta == 0:
        return 0.0
    ratio = np.linalg.solve(pair.hat_ok.matrix, pair.hat_ko.matrix)
    return (float(np.trace(ratio)) - pair.n_theta) / _TWO_LN2


def kappa(pair: DistortedPair) -> float:
    """Symmetrized KL divergence (1 / 2ln2) tr(M + M^-1 - 2I), M = hat_ok^-1 hat_ko.

    Computed through the symmetric similarity A^-1/2 B A^-1/2 so the
    spectrum is real by construction.  Eigenvalues of M below 1e-12 are a
    domain error: clamping them would silently erase the divergence.
    """
    if pair.n_theta == 0:
        return 0.0
    a = pair.hat_ok
    inv_sqrt = (a.basis / np.sqrt(a.eigenvalues)) @ a.basis.T
    similar = inv_sqrt @ pair.hat_ko.matrix @ inv_sqrt
    mu = np.linalg.eigvalsh((similar + similar.T) / 2.0)
    if mu[0] < _SIMILARITY_FLOOR:
        raise ValueError(f"hat_ko is singular relative to hat_ok (eigenvalue {mu[0]:.3e})")
    return float(np.sum(mu + 1.0 / mu - 2.0)) / _TWO_LN2


def _white_u(lam: np.ndarray, theta: float) -> np.ndarray:
    """Per-component ratio u_j for the identity anomaly, surviving components only."""
    act = lam[lam > theta]
    frac = theta / act
    return (1.0 - frac) / act + frac


def _check_trace_n(eigenvalues) -> np.ndarray:
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("eigenvalues must be a non-empty 1-d sequence")
    if abs(float(np.sum(lam)) - lam.size) > 1e-9:
        raise ValueError("eigenvalues must sum to n (trace-normalized source)")
    if np.any(np.diff(lam) > 0):
        raise ValueError("eigenvalues must be sorted descending")
    if lam[-1] < 0.0:
        raise ValueError("eigenvalues must be non-negative")
    return lam


def zeta_white(eigenvalues_ok, theta: float) -> float:
    """zeta against the identity anomaly, directly from the source spectrum."""
    lam = _check_trace_n(eigenvalues_ok)
    if theta < 0.0 or theta > lam[0]:
        raise ValueError(f"theta must be in [0, {lam[0]}], got {theta}")
    u = _white_u(lam, theta)
    return float(np.sum(u - 1.0)) / _TWO_LN2


def kappa_white(eigenvalues_ok, theta: float) -> float:
    """kappa against the identity anomaly, directly from the source spectrum."""
    lam = _check_trace_n(eigenvalues_ok)
    if theta < 0.0 or theta > lam[0]:
        raise ValueError(f"theta must be in [0, {lam[0]}], got {theta}")
    u = _white_u(lam, theta)
    return float(np.sum(u + 1.0 / u - 2.0)) / _TWO_LN2


def find_zeta_zero(eigenvalues_ok, tol: float = 1e-10) -> float | None:
    """Smallest positive water level where the white-anomaly zeta crosses zero.

    zeta_white is linear in theta between consecutive eigenvalues, so the
    root is bracketed by scanning those segments for a sign change and then
    bisecting.  A white spectrum has zeta_white identically zero (every
    theta is a root) and returns None; failing to find a sign change on a
    non-white spectrum violates the existence guarantee and raises.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    lam = _check_trace_n(eigenvalues_ok)
    if float(np.max(np.abs(lam - 1.0))) <= 1e-12:
        return None

    breakpoints = np.unique(lam[lam > 0.0])
    grid = np.concatenate(([0.0], breakpoints))
    values = np.array([float(np.sum(_white_u(lam, t) - 1.0)) for t in grid])

    for i in range(grid.size - 1):
        f_lo, f_hi = values[i], values[i + 1]
        if f_lo == 0.0 and i > 0:
            return float(grid[i])
        if f_lo * f_hi >= 0.0:
            continue
        lo, hi = float(grid[i]), float(grid[i + 1])
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            f_mid = float(np.sum(_white_u(lam, mid) - 1.0)) / _TWO_LN2
            if abs(f_mid) <= tol or hi - lo < 1e-15:
                return mid
            if (f_mid > 0.0) == (f_lo > 0.0):
                lo = mid
            else:
                hi = mid
        raise RuntimeError("bisection failed to converge on a bracketed root")
    raise RuntimeError(
        "no sign change of zeta_white on (0, lambda_max) for a non-white spectrum; "
        "this contradicts the critical-distortion existence guarantee"
    )
