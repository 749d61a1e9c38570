"""Uniform sampling of anomaly covariances and concentration diagnostics.

An anomaly is a random trace-n covariance: eigenvalues drawn uniformly on
the trace-n simplex, eigenvectors drawn Haar-uniformly on the orthogonal
group.  As n grows these matrices concentrate around the identity, which is
what the concentration statistics quantify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian import CovarianceSpec

__all__ = [
    "AnomalyModel",
    "ConcentrationStats",
    "sample_simplex_eigenvalues",
    "sample_haar_orthogonal",
    "sample_anomaly",
    "concentration_stats",
    "simplex_coordinate_expectation",
]


@dataclass(frozen=True)
class AnomalyModel:
    """A sampled anomalous covariance, constrained to trace n."""

    spec: CovarianceSpec

    def __post_init__(self):
        n = self.spec.dim
        if abs(self.spec.trace - n) > 1e-9:
            raise ValueError(f"anomaly trace {self.spec.trace} differs from n={n}")

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spec.eigenvalues

    @property
    def basis(self) -> np.ndarray:
        return self.spec.basis

    @property
    def matrix(self) -> np.ndarray:
        return self.spec.matrix


@dataclass(frozen=True)
class ConcentrationStats:
    """Mean and central percentile band of the identity deviations per dimension.

    delta2 is the Frobenius deviation divided by n, deltainf the largest
    absolute entry deviation.
    """

    dims: tuple
    population: int
    percentile: float
    delta2_mean: np.ndarray
    delta2_lo: np.ndarray
    delta2_hi: np.ndarray
    deltainf_mean: np.ndarray
    deltainf_lo: np.ndarray
    deltainf_hi: np.ndarray


def sample_simplex_eigenvalues(n: int, rng: np.random.Generator) -> np.ndarray:
    """One uniform draw from the trace-n simplex (coordinates unsorted).

    Draws xi_j ~ Unif[0,1] and normalizes the log vector; the result is
    uniform on the simplex of non-negative vectors summing to n.  An exact
    zero among the xi (probability zero, but representable) is redrawn.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    xi = rng.random(n)
    while np.any(xi == 0.0):
        zeros = xi == 0.0
        xi[zeros] = rng.random(int(np.count_nonzero(zeros)))
    logs = np.log(xi)
    return n * logs / np.sum(logs)


def sample_haar_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform orthogonal matrix via QR of a Ginibre draw.

    The QR factorization alone is not Haar; multiplying each column of Q by
    the sign of the matching diagonal entry of R removes the sign bias.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    while True:
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        diag = np.diagonal(r)
        if np.all(diag != 0.0):
            return q * np.sign(diag)
        # rank-deficient draw: probability zero, redraw


def sample_anomaly(n: int, rng: np.random.Generator) -> AnomalyModel:
    """Compose the simplex and Haar samplers into one anomaly covariance.

    The eigenvalues are drawn first, then the basis; sorting the
    eigenvalues descending is distribution-neutral because the Haar basis
    is invariant under column permutations.
    """
    lam = np.sort(sample_simplex_eigenvalues(n, rng))[::-1]
    basis = sample_haar_orthogonal(n, rng)
    return AnomalyModel(CovarianceSpec(lam, basis))


def concentration_stats(
    dims,
    population: int,
    percentile: float = 98.0,
    rng: np.random.Generator | None = None,
) -> ConcentrationStats:
    """Identity-deviation statistics of sampled anomalies per dimension."""
    dims = tuple(int(d) for d in dims)
    if any(b <= a for a, b in zip(dims, dims[1:])) or not dims:
        raise ValueError("dims must be non-empty and strictly ascending")
    if population < 50:
        raise ValueError("population must be at least 50 for stable quantiles")
    if not 0.0 < percentile < 100.0:
        raise ValueError("percentile must be in (0, 100)")
    if rng is None:
        rng = np.random.default_rng()

    tail = (1.0 - percentile / 100.0) / 2.0
    d2 = np.empty((len(dims), population))
    dinf = np.empty((len(dims), population))
    for i, n in enumerate(dims):
        eye = np.eye(n)
        for k in range(population):
            dev = sample_anomaly(n, rng).matrix - eye
            d2[i, k] = np.linalg.norm(dev) / n
            dinf[i, k] = np.max(np.abs(dev))

    return ConcentrationStats(
        dims=dims,
        population=population,
        percentile=percentile,
        delta2_mean=d2.mean(axis=1),
        delta2_lo=np.quantile(d2, tail, axis=1),
        delta2_hi=np.quantile(d2, 1.0 - tail, axis=1),
        deltainf_mean=dinf.mean(axis=1),
        deltainf_lo=np.quantile(dinf, tail, axis=1),
        deltainf_hi=np.quantile(dinf, 1.0 - tail, axis=1),
    )


def simplex_coordinate_expectation(n: int, integrand, quadrature_points: int = 256) -> float:
    """E[f(lambda_j)] for one coordinate of a uniform trace-n simplex draw.

    Evaluates ((n-1)/n^(n-1)) * integral_0^n f(p) (n-p)^(n-2) dp by
    composite Gauss-Legendre panels; the density factor is assembled in log
    space, where it is bounded above by (n-1)/n, so it can never overflow.
    The integrand must accept an ndarray of evaluation points.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if quadrature_points < 16:
        raise ValueError("need at least 16 quadrature points")
    if n == 1:
        # the 1-dim simplex is the single point {1}
        return float(np.asarray(integrand(np.array([1.0])), dtype=float).reshape(-1)[0])

    order = 16
    panels = max(1, quadrature_points // order)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, float(n), panels + 1)

    log_norm = math.log(n - 1) - (n - 1) * math.log(n)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        p = half * nodes + 0.5 * (a + b)
        log_density = log_norm + (n - 2) * np.log(n - p)
        values = np.asarray(integrand(p), dtype=float)
        total += half * float(np.sum(weights * values * np.exp(log_density)))
    if not math.isfinite(total):
        raise RuntimeError("quadrature accumulated a non-finite value")
    return total
