"""Seeded experiment sweeps and CSV emission.

One `run` sweeps (localization x distortion grid x anomalies) for each
configured compressor and detector, recording the theoretical metrics and
the Monte Carlo detection quality per anomaly.  Each (localization, grid
point, anomaly) triple is an independent task with a seed derived from the
master seed, so results are byte-identical regardless of how many worker
threads execute them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._version import __version__
from .anomalies import concentration_stats, sample_anomaly
from .compress import (
    PccPlan,
    encode_pcc,
    gaussian_mi_estimate,
    pcc_distorted_pair,
    pcc_plan,
    quantize,
    quantizer_for_variances,
)
from .detectors import auc as compute_auc
from .detectors import psi as fold_auc
from .detectors import sample_pair_instances, score_batch
from .gaussian import CovarianceSpec, ar1_covariance, solve_omega_for_localization
from .metrics import DistortedPair, find_zeta_zero, kappa, kappa_white, zeta, zeta_white
from .ratedist import TestChannel, encode_rdc, rdc_distorted_pair, reverse_waterfill

__all__ = [
    "DEFAULT_GRID",
    "DEFAULT_RD_GRID",
    "DEFAULT_LOCALIZATIONS",
    "DEFAULT_DIMS",
    "ExperimentConfig",
    "ExperimentRecord",
    "derive_seed",
    "run_experiment",
    "RUN_HEADER",
    "run_rows",
    "emit_theory_curves",
    "emit_rd_curves",
    "emit_concentration",
    "render_csv",
    "write_csv",
]

DEFAULT_LOCALIZATIONS = (0.0, 0.05, 0.2)
DEFAULT_GRID = tuple(np.linspace(0.0, 0.64, 9))
DEFAULT_RD_GRID = tuple(np.linspace(0.08, 0.64, 8))
DEFAULT_DIMS = (8, 16, 32, 64, 128)

_MASK64 = (1 << 64) - 1
_PCC_STEP_TOL = 1e-9
_QUANT_BITS = 16


def derive_seed(master_seed: int, *indices: int) -> int:
    """Stable 64-bit per-task seed from the master seed and task indices.

    splitmix64-style mixing; the same tuple always lands on the same seed,
    independent of scheduling or worker count.
    """
    h = int(master_seed) & _MASK64
    for ix in indices:
        h = (h ^ (int(ix) & _MASK64)) & _MASK64
        h = (h + 0x9E3779B97F4A7C15) & _MASK64
        h = ((h ^ (h >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        h = ((h ^ (h >> 27)) * 0x94D049BB133111EB) & _MASK64
        h = h ^ (h >> 31)
    return h


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one sweep; defaults are the desk-scale protocol."""

    n: int = 32
    localizations: tuple = DEFAULT_LOCALIZATIONS
    distortion_grid: tuple = DEFAULT_GRID
    compressors: tuple = ("rdc", "pcc")
    detectors: tuple = ("ld", "npd")
    n_anomalies: int = 100
    n_ok: int = 1000
    n_ko: int = 1000
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "localizations", tuple(float(v) for v in self.localizations))
        object.__setattr__(self, "distortion_grid", tuple(float(v) for v in self.distortion_grid))
        object.__setattr__(self, "compressors", tuple(self.compressors))
        object.__setattr__(self, "detectors", tuple(self.detectors))
        if self.n < 2:
            raise ValueError("n must be at least 2")
        for loc in self.localizations:
            if not 0.0 <= loc < 1.0 - 1.0 / self.n:
                raise ValueError(f"localization {loc} outside [0, 1 - 1/n)")
        if not self.distortion_grid:
            raise ValueError("distortion grid must be non-empty")
        for d in self.distortion_grid:
            if not 0.0 <= d <= 1.0:
                raise ValueError(f"normalized distortion {d} outside [0, 1]")
        if not self.compressors or any(c not in ("rdc", "pcc") for c in self.compressors):
            raise ValueError("compressors must be a non-empty subset of {'rdc', 'pcc'}")
        if not self.detectors or any(d not in ("ld", "npd") for d in self.detectors):
            raise ValueError("detectors must be a non-empty subset of {'ld', 'npd'}")
        if self.n_anomalies < 0:
            raise ValueError("n_anomalies must be non-negative")
        if self.n_ok < 2 or self.n_ko < 2:
            raise ValueError("instance counts must be at least 2")
        if not 0 <= int(self.master_seed) <= _MASK64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass(frozen=True)
class ExperimentRecord:
    """One CSV row; theory rows use detector='theory', anomaly_id=-1 and
    leave the Monte Carlo fields empty."""

    compressor: str
    localization: float
    d_requested: float
    d_achieved: float
    anomaly_id: int
    detector: str
    zeta: float
    kappa: float
    auc: float | None
    psi: float | None
    seed: int | None
    flag: str


RUN_HEADER = (
    "compressor",
    "localization",
    "d_requested",
    "d_achieved",
    "anomaly_id",
    "detector",
    "zeta",
    "kappa",
    "auc",
    "psi",
    "seed",
    "flag",
)


@dataclass(frozen=True)
class _OpPoint:
    """One (compressor, localization, grid point) operating point."""

    compressor: str
    d_requested: float
    d_achieved: float
    flag: str
    theta: float | None
    plan: PccPlan | None
    theory_zeta: float
    theory_kappa: float


def _identity_metrics_pcc(lam: np.ndarray, kept: int) -> tuple[float, float]:
    """zeta/kappa of the truncation pair against the identity anomaly."""
    if kept == 0:
        return 0.0, 0.0
    u = 1.0 / lam[:kept]
    scale = 2.0 * math.log(2.0)
    return float(np.sum(u - 1.0)) / scale, float(np.sum(u + 1.0 / u - 2.0)) / scale


def _operating_point(compressor: str, lam: np.ndarray, d: float) -> _OpPoint:
    n = lam.size
    if compressor == "rdc":
        if d == 0.0:
            theta, d_achieved = 0.0, 0.0
        else:
            sol = reverse_waterfill(lam, d * n)
            theta, d_achieved = sol.theta, sol.distortion / n
        return _OpPoint(
            compressor="rdc",
            d_requested=d,
            d_achieved=d_achieved,
            flag="",
            theta=theta,
            plan=None,
            theory_zeta=zeta_white(lam, theta),
            theory_kappa=kappa_white(lam, theta),
        )
    plan = pcc_plan(lam, d * n)
    d_achieved = plan.achieved_distortion / n
    t_zeta, t_kappa = _identity_metrics_pcc(lam, plan.kept)
    return _OpPoint(
        compressor="pcc",
        d_requested=d,
        d_achieved=d_achieved,
        flag="pcc-step" if abs(d_achieved - d) > _PCC_STEP_TOL else "",
        theta=None,
        plan=plan,
        theory_zeta=t_zeta,
        theory_kappa=t_kappa,
    )


def _pair_for(point: _OpPoint, source: CovarianceSpec, anomaly: CovarianceSpec) -> DistortedPair:
    if point.compressor == "rdc":
        return rdc_distorted_pair(source, anomaly, point.theta)
    if point.plan.kept == 0:
        return DistortedPair(hat_ok=None, hat_ko=None, n_theta=0)
    return pcc_distorted_pair(source, anomaly, point.plan)


def run_experiment(config: ExperimentConfig) -> list[ExperimentRecord]:
    """Run the full sweep and return records in deterministic order.

    Rows are grouped by (localization, grid point): first one theory row
    per compressor, then the per-anomaly Monte Carlo rows.  Within a task
    the anomaly is drawn before any instance sampling, so the stored seed
    alone reproduces the anomaly (and hence zeta/kappa) offline.
    """
    sources = [
        ar1_covariance(solve_omega_for_localization(loc, config.n), config.n)
        for loc in config.localizations
    ]
    points: dict[tuple[int, int, str], _OpPoint] = {}
    for li, source in enumerate(sources):
        for gi, d in enumerate(config.distortion_grid):
            for comp in config.compressors:
                points[(li, gi, comp)] = _operating_point(comp, source.eigenvalues, d)

    def worker(task: tuple[int, int, int]) -> list[ExperimentRecord]:
        li, gi, ai = task
        seed = derive_seed(config.master_seed, li, gi, ai)
        rng = np.random.default_rng(seed)
        anomaly = sample_anomaly(config.n, rng).spec
        out = []
        for comp in config.compressors:
            point = points[(li, gi, comp)]
            pair = _pair_for(point, sources[li], anomaly)
            z_val, k_val = zeta(pair), kappa(pair)
            if pair.n_theta == 0:
                results = {det: 0.5 for det in config.detectors}
            else:
                y_ok, y_ko = sample_pair_instances(pair, config.n_ok, config.n_ko, rng)
                results = {
                    det: compute_auc(score_batch(det, pair, y_ok), score_batch(det, pair, y_ko))
                    for det in config.detectors
                }
            for det in config.detectors:
                auc_val = results[det]
                out.append(
                    ExperimentRecord(
                        compressor=comp,
                        localization=config.localizations[li],
                        d_requested=point.d_requested,
                        d_achieved=point.d_achieved,
                        anomaly_id=ai,
                        detector=det,
                        zeta=z_val,
                        kappa=k_val,
                        auc=auc_val,
                        psi=fold_auc(auc_val),
                        seed=seed,
                        flag=point.flag,
                    )
                )
        return out

    tasks = [
        (li, gi, ai)
        for li in range(len(config.localizations))
        for gi in range(len(config.distortion_grid))
        for ai in range(config.n_anomalies)
    ]
    if config.workers == 1 or not tasks:
        task_rows = [worker(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            task_rows = list(pool.map(worker, tasks))

    records: list[ExperimentRecord] = []
    per_point = config.n_anomalies
    for li, loc in enumerate(config.localizations):
        for gi, d in enumerate(config.distortion_grid):
            for comp in config.compressors:
                point = points[(li, gi, comp)]
                records.append(
                    ExperimentRecord(
                        compressor=comp,
                        localization=loc,
                        d_requested=point.d_requested,
                        d_achieved=point.d_achieved,
                        anomaly_id=-1,
                        detector="theory",
                        zeta=point.theory_zeta,
                        kappa=point.theory_kappa,
                        auc=None,
                        psi=None,
                        seed=None,
                        flag=point.flag,
                    )
                )
            base = (li * len(config.distortion_grid) + gi) * per_point
            for ai in range(per_point):
                records.extend(task_rows[base + ai])
    return records


def run_rows(records) -> list[tuple]:
    """Flatten records into CSV row tuples in RUN_HEADER order."""
    return [
        (
            r.compressor,
            r.localization,
            r.d_requested,
            r.d_achieved,
            r.anomaly_id,
            r.detector,
            r.zeta,
            r.kappa,
            r.auc,
            r.psi,
            r.seed,
            r.flag,
        )
        for r in records
    ]


THEORY_HEADER = ("localization", "d", "zeta_white", "kappa_white", "theta", "n_theta", "tag")


def emit_theory_curves(n: int, localizations, grid, root_tol: float = 1e-10) -> list[tuple]:
    """White-anomaly metric curves per localization, plus the critical root.

    The root row (tag 'zeta-zero') carries the smallest water level where
    the anomaly-agnostic metric changes sign; a white source has no such
    isolated root and gets no row.
    """
    rows = []
    for loc in localizations:
        source = ar1_covariance(solve_omega_for_localization(loc, n), n)
        lam = source.eigenvalues

        def point(theta: float, d: float, tag: str) -> tuple:
            n_theta = int(np.count_nonzero(lam > theta))
            return (loc, d, zeta_white(lam, theta), kappa_white(lam, theta), theta, n_theta, tag)

        for d in grid:
            if not 0.0 <= d <= 1.0:
                raise ValueError(f"normalized distortion {d} outside [0, 1]")
            theta = 0.0 if d == 0.0 else reverse_waterfill(lam, d * n).theta
            rows.append(point(theta, float(d), ""))
        theta_star = find_zeta_zero(lam, root_tol)
        if theta_star is not None:
            d_star = float(np.sum(np.minimum(theta_star, lam))) / n
            rows.append(point(theta_star, d_star, "zeta-zero"))
    return rows


RD_HEADER = (
    "compressor",
    "localization",
    "d_achieved",
    "rate_analytic",
    "rate_mi_quantized",
    "rate_analytic_per_dim",
)


def _mi_rdc(lam: np.ndarray, delta: float, samples: int, rng: np.random.Generator) -> tuple[float, float]:
    """(analytic rate, quantized-MI rate) of the test channel at distortion delta."""
    sol = reverse_waterfill(lam, delta)
    channel = TestChannel(CovarianceSpec(lam, np.eye(lam.size)), sol)
    x = rng.standard_normal((samples, lam.size)) * np.sqrt(lam)
    x_hat = encode_rdc(x, channel, rng)
    deq = quantize(x_hat, quantizer_for_variances(lam * sol.s, _QUANT_BITS)).dequantized
    return sol.rate_bits, gaussian_mi_estimate(x, deq)


def _mi_pcc(lam: np.ndarray, plan: PccPlan, samples: int, rng: np.random.Generator) -> tuple[float, float]:
    """(coded size in bits, quantized-MI rate) of truncation to plan.kept components."""
    x = rng.standard_normal((samples, lam.size)) * np.sqrt(lam)
    x_hat = encode_pcc(x, plan)
    variances = np.where(np.arange(lam.size) < plan.kept, lam, 0.0)
    deq = quantize(x_hat, quantizer_for_variances(variances, _QUANT_BITS)).dequantized
    return float(_QUANT_BITS * plan.kept), gaussian_mi_estimate(x, deq)


def emit_rd_curves(n: int, localizations, grid, seed: int = 0, mi_samples: int = 20000) -> list[tuple]:
    """Rate curves: analytic rate and quantized-MI rate per operating point.

    PCC realizes only its step distortions, so each grid point also gets an
    extra RDC row at the PCC-achieved distortion; rows matched on
    d_achieved then compare the two schemes at the same operating point.
    Requires d > 0 (the analytic rate at zero distortion is unbounded).
    """
    rows = []
    for li, loc in enumerate(localizations):
        source = ar1_covariance(solve_omega_for_localization(loc, n), n)
        lam = source.eigenvalues
        for gi, d in enumerate(grid):
            if not 0.0 < d <= 1.0:
                raise ValueError(f"rate curves need d in (0, 1], got {d}")
            delta = d * n
            rate, mi = _mi_rdc(lam, delta, mi_samples, np.random.default_rng(derive_seed(seed, li, gi, 0)))
            rows.append(("rdc", loc, delta / n, rate, mi, rate / n))

            plan = pcc_plan(lam, delta)
            d_ach = plan.achieved_distortion / n
            coded, mi = _mi_pcc(lam, plan, mi_samples, np.random.default_rng(derive_seed(seed, li, gi, 1)))
            rows.append(("pcc", loc, d_ach, coded, mi, coded / n))

            if abs(plan.achieved_distortion - delta) > _PCC_STEP_TOL and plan.achieved_distortion > 0.0:
                rate, mi = _mi_rdc(
                    lam, plan.achieved_distortion, mi_samples,
                    np.random.default_rng(derive_seed(seed, li, gi, 2)),
                )
                rows.append(("rdc", loc, d_ach, rate, mi, rate / n))
    return rows


CONCENTRATION_HEADER = (
    "n",
    "delta2_mean",
    "delta2_lo",
    "delta2_hi",
    "deltainf_mean",
    "deltainf_lo",
    "deltainf_hi",
)


def emit_concentration(dims, population: int, percentile: float = 98.0, seed: int = 0) -> list[tuple]:
    """Identity-concentration statistics per dimension as CSV rows."""
    stats = concentration_stats(dims, population, percentile, np.random.default_rng(derive_seed(seed, 0)))
    return [
        (
            stats.dims[i],
            stats.delta2_mean[i],
            stats.delta2_lo[i],
            stats.delta2_hi[i],
            stats.deltainf_mean[i],
            stats.deltainf_lo[i],
            stats.deltainf_hi[i],
        )
        for i in range(len(stats.dims))
    ]


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def render_csv(header, rows, seed: int) -> str:
    """CSV text: one metadata comment line, a header, then 12-digit rows."""
    lines = [f"# seed={int(seed)} version={__version__}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path: str, header, rows, seed: int) -> None:
    text = render_csv(header, rows, seed)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
