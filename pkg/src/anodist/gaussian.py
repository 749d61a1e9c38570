"""Gaussian source models: covariances in eigen form, AR(1) construction,
localization, and batch sampling.

Everything downstream works on a :class:`CovarianceSpec`, which stores a
symmetric PSD matrix as (eigenvalues descending, orthonormal basis).  Batches
of samples are plain ``(count, n)`` float arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CovarianceSpec",
    "ar1_covariance",
    "localization",
    "solve_omega_for_localization",
    "sample_gaussian",
    "sample_covariance",
]

_ORTHO_TOL = 1e-10
_EIG_FLOOR = -1e-10


@dataclass(frozen=True)
class CovarianceSpec:
    """A symmetric PSD matrix held as ``basis @ diag(eigenvalues) @ basis.T``.

    Eigenvalues are sorted descending and tiny negative values (round-off
    from an eigensolver) are clamped to zero; anything below -1e-10 is
    rejected.  Arrays are stored read-only so instances can be shared across
    threads.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        lam = np.array(self.eigenvalues, dtype=float)
        u = np.array(self.basis, dtype=float)
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("eigenvalues must be a non-empty 1-d sequence")
        n = lam.size
        if u.shape != (n, n):
            raise ValueError(f"basis must be {n}x{n}, got {u.shape}")
        if np.any(np.diff(lam) > 0):
            raise ValueError("eigenvalues must be sorted descending")
        if lam[-1] < _EIG_FLOOR:
            raise ValueError(f"not PSD: min eigenvalue {lam[-1]:.3e}")
        np.clip(lam, 0.0, None, out=lam)
        gram_err = np.max(np.abs(u.T @ u - np.eye(n)))
        if gram_err > _ORTHO_TOL:
            raise ValueError(f"basis not orthonormal: max |U'U - I| = {gram_err:.3e}")
        lam.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "basis", u)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def trace(self) -> float:
        return float(np.sum(self.eigenvalues))

    @property
    def matrix(self) -> np.ndarray:
        """Reconstructed dense matrix U diag(lam) U'."""
        return (self.basis * self.eigenvalues) @ self.basis.T

    @classmethod
    def from_matrix(cls, sigma) -> "CovarianceSpec":
        """Eigendecompose a symmetric matrix (tolerating 1e-8 asymmetry)."""
        sigma = np.asarray(sigma, dtype=float)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise ValueError("covariance must be a square matrix")
        asym = np.max(np.abs(sigma - sigma.T))
        if asym > 1e-8:
            raise ValueError(f"matrix not symmetric: max |S - S'| = {asym:.3e}")
        lam, u = np.linalg.eigh((sigma + sigma.T) / 2.0)
        # stable sort keeps the eigensolver's order among ties
        order = np.argsort(-lam, kind="stable")
        return cls(lam[order], u[:, order])

    @classmethod
    def from_eigenvalues(cls, eigenvalues) -> "CovarianceSpec":
        """Diagonal covariance with identity basis (input sorted descending)."""
        lam = np.sort(np.asarray(eigenvalues, dtype=float))[::-1]
        return cls(lam, np.eye(lam.size))


def ar1_covariance(omega: float, n: int) -> CovarianceSpec:
    """Eigen form of the AR(1) Toeplitz matrix with entries omega**|j-k|.

    The diagonal is all ones, so the trace is exactly n.
    """
    if not 0.0 <= omega < 1.0:
        raise ValueError(f"omega must be in [0, 1), got {omega}")
    if n < 1:
        raise ValueError("n must be a positive integer")
    idx = np.arange(n)
    sigma = omega ** np.abs(idx[:, None] - idx[None, :])
    return CovarianceSpec.from_matrix(sigma)


def localization(cov) -> float:
    """Spectral concentration tr(S^2)/tr(S)^2 - 1/n.

    Zero for a white spectrum, 1 - 1/n when all energy sits in one
    component.  Depends on the eigenvalues only; accepts either a
    CovarianceSpec or a bare eigenvalue sequence.
    """
    lam = cov.eigenvalues if isinstance(cov, CovarianceSpec) else np.asarray(cov, dtype=float)
    total = np.sum(lam)
    if total <= 0.0:
        raise ValueError("localization needs a positive trace")
    return float(np.sum(lam**2) / total**2 - 1.0 / lam.size)


def solve_omega_for_localization(target: float, n: int, tol: float = 1e-12) -> float:
    """Invert localization(ar1_covariance(omega, n)) = target by bisection.

    Localization is monotone increasing in omega on [0, 1), so a plain
    bisection converges; 200 iterations is far more than the ~50 needed to
    exhaust double precision.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 <= target < 1.0 - 1.0 / n:
        raise ValueError(f"target localization must be in [0, 1 - 1/n), got {target}")
    if target == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0 - 1e-12
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        err = localization(ar1_covariance(mid, n)) - target
        if abs(err) <= tol:
            return mid
        if err < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            return 0.5 * (lo + hi)
    raise RuntimeError("localization bisection did not converge in 200 iterations")


def sample_gaussian(cov: CovarianceSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` i.i.d. rows from N(0, cov).

    Zero-eigenvalue components are exactly zero in the eigenbasis (a
    zero-variance Gaussian is a point mass, not a jittered one).
    """
    if count < 1:
        raise ValueError("count must be positive")
    z = rng.standard_normal((count, cov.dim))
    scaled = z * np.sqrt(cov.eigenvalues)
    return scaled @ cov.basis.T


def sample_covariance(batch, zero_mean: bool = False) -> CovarianceSpec:
    """Sample covariance of a (count, n) batch, divided by count - 1.

    By default the sample mean is subtracted; pass ``zero_mean=True`` to use
    raw second moments (both sources here are zero-mean by construction).
    """
    x = np.asarray(batch, dtype=float)
    if x.ndim != 2:
        raise ValueError("batch must be a (count, n) array")
    count = x.shape[0]
    if count < 2:
        raise ValueError("sample covariance needs at least 2 rows")
    if not np.all(np.isfinite(x)):
        raise ValueError("batch contains non-finite values")
    if not zero_mean:
        x = x - x.mean(axis=0)
    return CovarianceSpec.from_matrix(x.T @ x / (count - 1))
