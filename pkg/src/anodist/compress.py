"""Compression schemes: principal-component truncation (PCC), the quantizer
wrapper used for rate measurement, and the Gaussian mutual-information
estimator.

The rate-distortion-optimal scheme (RDC) is the test channel from
``ratedist``; this module adds only its quantized rate measurement.  All
encoders work in the source eigenbasis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .gaussian import CovarianceSpec
from .metrics import DistortedPair

__all__ = [
    "PccPlan",
    "QuantizerSpec",
    "QuantizedBatch",
    "pcc_plan",
    "encode_pcc",
    "pcc_distorted_pair",
    "quantizer_for_variances",
    "quantize",
    "gaussian_mi_estimate",
]


@dataclass(frozen=True)
class PccPlan:
    """Keep the leading ``kept`` eigencomponents, zero the rest.

    ``achieved_distortion`` is the dropped tail power: PCC can only realize
    the discrete distortion steps given by tail sums of the spectrum.
    ``hat_ok`` is the kept diagonal block (None when nothing is kept).
    """

    kept: int
    achieved_distortion: float
    hat_ok: CovarianceSpec | None
    basis: np.ndarray


def pcc_plan(eigenvalues_ok, delta_budget: float) -> PccPlan:
    """Smallest number of kept components whose dropped tail fits the budget."""
    if isinstance(eigenvalues_ok, CovarianceSpec):
        lam = eigenvalues_ok.eigenvalues
        basis = eigenvalues_ok.basis
    else:
        lam = np.asarray(eigenvalues_ok, dtype=float)
        basis = np.eye(lam.size)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("eigenvalues must be a non-empty 1-d sequence")
    if np.any(np.diff(lam) > 0) or lam[-1] < 0.0:
        raise ValueError("eigenvalues must be sorted descending and non-negative")
    total = float(np.sum(lam))
    if delta_budget < 0.0 or delta_budget > total * (1.0 + 1e-12):
        raise ValueError(f"budget must be in [0, {total}], got {delta_budget}")

    tails = np.concatenate((np.cumsum(lam[::-1])[::-1], [0.0]))
    kept = int(np.argmax(tails <= delta_budget))
    hat_ok = CovarianceSpec(lam[:kept], np.eye(kept)) if kept > 0 else None
    return PccPlan(
        kept=kept,
        achieved_distortion=float(tails[kept]),
        hat_ok=hat_ok,
        basis=basis,
    )


def encode_pcc(x, plan: PccPlan) -> np.ndarray:
    """Zero every coordinate past the kept ones (input in the source eigenbasis)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != plan.basis.shape[0]:
        raise ValueError("instance dimension does not match the plan")
    out = x.copy()
    out[..., plan.kept:] = 0.0
    return out


def pcc_distorted_pair(source: CovarianceSpec, anomaly: CovarianceSpec, plan: PccPlan) -> DistortedPair:
    """Kept-subspace covariance pair under truncation.

    Truncation adds no noise, so the pair is just the leading kept-by-kept
    blocks: the source spectrum for hat_ok and the conjugated anomaly for
    hat_ko.
    """
    if anomaly.dim != source.dim:
        raise ValueError("anomaly and source dimensions differ")
    p = plan.kept
    if p == 0:
        raise ValueError("plan keeps no components: the pair is degenerate")
    u = source.basis
    conj = u.T @ anomaly.matrix @ u
    return DistortedPair(
        hat_ok=CovarianceSpec(source.eigenvalues[:p], np.eye(p)),
        hat_ko=CovarianceSpec.from_matrix(conj[:p, :p]),
        n_theta=p,
    )


@dataclass(frozen=True)
class QuantizerSpec:
    """Per-component uniform mid-rise quantizer with saturation.

    half_range is the clipping bound per component (6 standard deviations
    of the encoded signal keeps the saturation probability below 2e-9).
    Zero-variance components get a zero step and are pinned to the midpoint
    code with an exactly-zero dequantized value.
    """

    bits: int
    half_range: np.ndarray

    def __post_init__(self):
        if not 1 <= self.bits <= 32:
            raise ValueError("bits must be in [1, 32]")
        hr = np.asarray(self.half_range, dtype=float)
        if hr.ndim != 1 or np.any(~np.isfinite(hr)) or np.any(hr < 0.0):
            raise ValueError("half_range must be a 1-d array of finite non-negative reals")
        hr = hr.copy()
        hr.setflags(write=False)
        object.__setattr__(self, "half_range", hr)

    @property
    def step(self) -> np.ndarray:
        return 2.0 * self.half_range / (1 << self.bits)


class QuantizedBatch(NamedTuple):
    codes: np.ndarray
    dequantized: np.ndarray
    n_saturated: int


def quantizer_for_variances(variances, bits: int = 16) -> QuantizerSpec:
    """Quantizer spanning 6 standard deviations of each component."""
    var = np.asarray(variances, dtype=float)
    if np.any(var < 0.0):
        raise ValueError("variances must be non-negative")
    return QuantizerSpec(bits=bits, half_range=6.0 * np.sqrt(var))


def quantize(x_hat, spec: QuantizerSpec) -> QuantizedBatch:
    """Uniform mid-rise quantization with silent saturation.

    Returns integer codes, the dequantized reconstruction, and the count of
    saturated entries (inputs outside [-half_range, half_range)).
    """
    x = np.asarray(x_hat, dtype=float)
    if x.shape[-1] != spec.half_range.size:
        raise ValueError("instance dimension does not match the quantizer")
    step = spec.step
    levels = 1 << spec.bits
    live = step > 0.0

    raw = np.floor(np.divide(x + spec.half_range, step, out=np.zeros_like(x), where=live))
    saturated = live & ((raw < 0) | (raw > levels - 1))
    saturated |= ~live & (x != 0.0)
    codes = np.where(live, np.clip(raw, 0, levels - 1), levels // 2).astype(np.int64)
    deq = np.where(live, -spec.half_range + (codes + 0.5) * step, 0.0)
    return QuantizedBatch(codes=codes, dequantized=deq, n_saturated=int(np.count_nonzero(saturated)))


def gaussian_mi_estimate(batch_x, batch_xhat, regularization: float | None = None) -> float:
    """Mutual information (bits/vector) as if (x, x_hat) were jointly Gaussian.

    Plug-in estimate 0.5*log2(|S_xx| |S_yy| / |S_joint|) from the sample
    covariance of the stacked batch, with a small ridge on the diagonal so
    near-deterministic channels stay factorizable.  Log-determinants come
    from Cholesky factors.
    """
    x = np.asarray(batch_x, dtype=float)
    y = np.asarray(batch_xhat, dtype=float)
    if x.ndim != 2 or y.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError("batches must be (count, n) arrays with equal counts")
    count = x.shape[0]
    dim = x.shape[1] + y.shape[1]
    if count < 10 * dim:
        raise ValueError(f"need at least {10 * dim} samples for a {dim}-dim joint covariance")

    joint = np.hstack((x, y))
    joint = joint - joint.mean(axis=0)
    cov = joint.T @ joint / (count - 1)
    if regularization is None:
        regularization = 1e-9 * float(np.trace(cov)) / dim
    cov[np.diag_indices_from(cov)] += regularization

    def logdet(m: np.ndarray) -> float:
        try:
            chol = np.linalg.cholesky(m)
        except np.linalg.LinAlgError as err:
            raise RuntimeError("joint covariance is not PD after regularization") from err
        return 2.0 * float(np.sum(np.log(np.diagonal(chol))))

    nx = x.shape[1]
    mi_nats = 0.5 * (logdet(cov[:nx, :nx]) + logdet(cov[nx:, nx:]) - logdet(cov))
    return mi_nats / math.log(2.0)
