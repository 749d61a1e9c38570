"""Acceptance gate: twelve checks at pinned tolerances, one per test.

Each test prints an explicit PASS/FAIL line (visible with -s) in addition
to the pytest verdict.  Statistical checks use pinned seeds per the suite
convention.
"""
import math
import time

import numpy as np
import pytest
import scipy.stats

from anodist import (
    CovarianceSpec,
    TestChannel,
    ar1_covariance,
    distorted_anomaly_cov,
    encode_rdc,
    evaluate,
    find_zeta_zero,
    kappa,
    kappa_white,
    pcc_distorted_pair,
    pcc_plan,
    rdc_distorted_pair,
    reverse_waterfill,
    sample_anomaly,
    sample_simplex_eigenvalues,
    simplex_coordinate_expectation,
    solve_omega_for_localization,
    zeta,
    zeta_white,
)
from anodist.experiment import (
    DEFAULT_LOCALIZATIONS,
    DEFAULT_RD_GRID,
    RUN_HEADER,
    ExperimentConfig,
    emit_rd_curves,
    render_csv,
    run_experiment,
    run_rows,
)
from anodist.anomalies import concentration_stats


def report(num: int, name: str, ok: bool, detail: str = "") -> None:
    verdict = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[criterion {num:02d}] {verdict}: {name}{suffix}", flush=True)


def source_for(loc: float, n: int) -> CovarianceSpec:
    return ar1_covariance(solve_omega_for_localization(loc, n), n)


def test_c01_waterfill_exactness():
    sol = reverse_waterfill((1.5, 0.5), 1.0)
    t0 = time.perf_counter()
    for _ in range(10):
        reverse_waterfill((1.5, 0.5), 1.0)
    per_call = (time.perf_counter() - t0) / 10
    ok = (
        abs(sol.theta - 0.5) <= 1e-9
        and abs(sol.rate_bits - 0.792481250360578) <= 1e-9
        and per_call < 1e-3
    )
    report(1, "water-filling exactness", ok, f"theta={sol.theta} rate={sol.rate_bits:.12f} {per_call * 1e6:.0f}us")
    assert ok


def test_c02_test_channel_fidelity():
    t0 = time.perf_counter()
    n, loc, d = 32, 0.2, 0.3
    source = source_for(loc, n)
    lam = source.eigenvalues
    sol = reverse_waterfill(lam, d * n)
    chan = TestChannel(CovarianceSpec(lam, np.eye(n)), sol)
    rng = np.random.default_rng(20260201)
    x = rng.standard_normal((100_000, n)) * np.sqrt(lam)
    x_hat = encode_rdc(x, chan, rng)

    dist = float(np.mean(np.sum((x - x_hat) ** 2, axis=1)))
    dist_ok = abs(dist - sol.distortion) <= 0.02 * sol.distortion

    pred = np.diag(np.maximum(lam - sol.theta, 0.0))
    emp = x_hat.T @ x_hat / x_hat.shape[0]
    cov_ok = np.linalg.norm(emp - pred) <= 0.03 * np.linalg.norm(pred)
    dead_ok = bool(np.all(x_hat[:, lam <= sol.theta] == 0.0))
    elapsed = time.perf_counter() - t0

    ok = dist_ok and cov_ok and dead_ok and elapsed < 10.0
    report(2, "test-channel fidelity", ok,
           f"E|x-xhat|^2={dist:.4f} vs {sol.distortion:.4f}, {elapsed:.1f}s")
    assert ok


def test_c03_distorted_anomaly_corners():
    rng = np.random.default_rng(33)
    worst_ident = 0.0
    worst_same = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 16))
        lam = rng.uniform(0.05, 1.0, size=n)
        lam = np.sort(lam * n / lam.sum())[::-1]
        basis = sample_anomaly(n, rng).basis
        source = CovarianceSpec(lam, basis)
        anomaly = sample_anomaly(n, rng).spec
        theta = float(rng.uniform(0.0, lam[0]))

        ident = distorted_anomaly_cov(anomaly, source, 0.0).matrix
        conj = source.basis.T @ anomaly.matrix @ source.basis
        worst_ident = max(worst_ident, float(np.max(np.abs(ident - conj))))

        same = distorted_anomaly_cov(source, source, theta).matrix
        want = np.diag(np.maximum(lam - theta, 0.0))
        worst_same = max(worst_same, float(np.max(np.abs(same - want))))

    ok = worst_ident <= 1e-12 and worst_same <= 1e-12
    report(3, "distorted-anomaly corner cases", ok,
           f"max dev {worst_ident:.2e} / {worst_same:.2e}")
    assert ok


def test_c04_metric_integral_agreement():
    t0 = time.perf_counter()
    n, samples = 3, 1_000_000
    rng = np.random.default_rng(444)
    lam = np.array([1.8, 0.9, 0.3])
    source = CovarianceSpec(lam, np.eye(n))
    checks = []
    for anomaly in (sample_anomaly(n, rng).spec, CovarianceSpec.from_eigenvalues(np.ones(n))):
        pair = rdc_distorted_pair(source, anomaly, 0.35)
        a = pair.hat_ok.matrix
        b = pair.hat_ko.matrix
        f_ok = scipy.stats.multivariate_normal(mean=np.zeros(pair.n_theta), cov=a)
        f_ko = scipy.stats.multivariate_normal(mean=np.zeros(pair.n_theta), cov=b)
        draw_ok = rng.multivariate_normal(np.zeros(pair.n_theta), a, size=samples)
        draw_ko = rng.multivariate_normal(np.zeros(pair.n_theta), b, size=samples)

        ln2 = math.log(2.0)
        ell_ok_given_ko = -f_ok.logpdf(draw_ko) / ln2
        ell_ok_given_ok = -f_ok.logpdf(draw_ok) / ln2
        z_mc = ell_ok_given_ko.mean() - ell_ok_given_ok.mean()
        z_se = math.hypot(
            ell_ok_given_ko.std(ddof=1), ell_ok_given_ok.std(ddof=1)
        ) / math.sqrt(samples)

        r_given_ko = (f_ko.logpdf(draw_ko) - f_ok.logpdf(draw_ko)) / ln2
        r_given_ok = (f_ko.logpdf(draw_ok) - f_ok.logpdf(draw_ok)) / ln2
        k_mc = r_given_ko.mean() - r_given_ok.mean()
        k_se = math.hypot(r_given_ko.std(ddof=1), r_given_ok.std(ddof=1)) / math.sqrt(samples)

        checks.append((zeta(pair), z_mc, z_se, kappa(pair), k_mc, k_se))

    ok = all(
        abs(z - z_mc) <= 3 * z_se and abs(k - k_mc) <= 3 * k_se
        for z, z_mc, z_se, k, k_mc, k_se in checks
    )
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 60.0
    detail = "; ".join(
        f"zeta {z:.4f}|{z_mc:.4f}+-{3 * z_se:.4f}, kappa {k:.4f}|{k_mc:.4f}+-{3 * k_se:.4f}"
        for z, z_mc, z_se, k, k_mc, k_se in checks
    )
    report(4, "metric-integral agreement", ok, f"{detail}, {elapsed:.1f}s")
    assert ok


def test_c05_critical_distortion_root():
    two = find_zeta_zero(np.array([1.5, 0.5]))
    ok = abs(two - 0.375) <= 1e-10
    for loc in (0.05, 0.2):
        lam = source_for(loc, 32).eigenvalues
        theta_star = find_zeta_zero(lam)
        lam_kbar = lam[lam >= 1.0][-1]  # smallest eigenvalue above the white level
        ok = ok and abs(zeta_white(lam, theta_star)) <= 1e-8
        ok = ok and 0.0 < theta_star < lam_kbar
        ok = ok and zeta_white(lam, 1e-12) > 0.0
        ok = ok and zeta_white(lam, lam[0] * 0.999999) < 0.0
    report(5, "critical-distortion root", ok, f"two-component root {two}")
    assert ok


def test_c06_detector_failure_alignment():
    n = 32
    white = CovarianceSpec.from_eigenvalues(np.ones(n))
    means = {}
    for loc in (0.05, 0.2):
        source = source_for(loc, n)
        theta_star = find_zeta_zero(source.eigenvalues)
        pair_star = rdc_distorted_pair(source, white, theta_star)
        psis = [
            evaluate("ld", pair_star, 1000, 1000, np.random.default_rng(1000 + s)).psi
            for s in range(20)
        ]
        means[loc] = float(np.mean(psis))
    pair_zero = rdc_distorted_pair(source_for(0.2, n), white, 0.0)
    psi_zero = float(np.mean([
        evaluate("ld", pair_zero, 1000, 1000, np.random.default_rng(2000 + s)).psi
        for s in range(20)
    ]))
    ok = all(abs(m - 0.5) <= 0.05 for m in means.values()) and psi_zero > 0.55
    report(6, "detector failure at the critical distortion", ok,
           f"psi@d*={means}, psi@0={psi_zero:.3f}")
    assert ok


def test_c07_averaging_identities():
    n, loc, d, count = 32, 0.2, 0.2, 500
    source = source_for(loc, n)
    theta = reverse_waterfill(source.eigenvalues, d * n).theta
    z_i = zeta_white(source.eigenvalues, theta)
    k_i = kappa_white(source.eigenvalues, theta)
    rng = np.random.default_rng(777)
    zs = np.empty(count)
    ks = np.empty(count)
    for i in range(count):
        pair = rdc_distorted_pair(source, sample_anomaly(n, rng).spec, theta)
        zs[i] = zeta(pair)
        ks[i] = kappa(pair)
    z_se = zs.std(ddof=1) / math.sqrt(count)
    k_se = ks.std(ddof=1) / math.sqrt(count)
    zeta_ok = abs(zs.mean() - z_i) <= 3 * z_se
    kappa_ok = ks.mean() - k_i > 3 * k_se
    ok = zeta_ok and kappa_ok
    report(7, "ensemble averaging identities", ok,
           f"zeta {zs.mean():.4f} vs {z_i:.4f} (3se {3 * z_se:.4f}); "
           f"kappa gap {ks.mean() - k_i:.3f} vs 3se {3 * k_se:.3f}")
    assert ok


def test_c08_simplex_moments():
    n, draws = 32, 100_000
    rng = np.random.default_rng(88)
    batch = np.empty((draws, n))
    for i in range(draws):
        batch[i] = sample_simplex_eigenvalues(n, rng)
    mean_ok = bool(np.all(np.abs(batch.mean(axis=0) - 1.0) <= 0.02))
    want = 2 * n / (n + 1)
    second = float(np.mean(batch**2))
    second_ok = abs(second - want) <= 0.02 * want
    quad = simplex_coordinate_expectation(n, lambda p: p**2)
    quad_ok = abs(quad - 64.0 / 33.0) <= 1e-6
    ok = mean_ok and second_ok and quad_ok
    report(8, "simplex moments", ok,
           f"E[lam^2]={second:.5f} vs {want:.5f}, quadrature err {abs(quad - 64 / 33):.1e}")
    assert ok


def test_c09_concentration_convergence():
    t0 = time.perf_counter()
    dims = (8, 16, 32, 64, 128)
    stats = concentration_stats(dims, 200, rng=np.random.default_rng(99))
    decreasing = bool(np.all(np.diff(stats.delta2_mean) < 0.0))
    slope = float(np.polyfit(np.log(dims), np.log(stats.delta2_mean), 1)[0])
    elapsed = time.perf_counter() - t0
    ok = decreasing and abs(slope + 0.5) <= 0.1 and elapsed < 120.0
    report(9, "identity concentration rate", ok, f"slope {slope:.3f}, {elapsed:.1f}s")
    assert ok


def test_c10_quantized_rate_ordering():
    n = 32
    rows = emit_rd_curves(n, DEFAULT_LOCALIZATIONS, DEFAULT_RD_GRID, seed=0)
    all_rates = [r[3] for r in rows] + [r[4] for r in rows]
    bound_ok = all(rate < 512.0 for rate in all_rates)

    mi_by_point = {}
    for comp, loc, d_ach, _rate, mi, _per_dim in rows:
        mi_by_point.setdefault((loc, round(d_ach, 9)), {})[comp] = mi
    matched = [v for v in mi_by_point.values() if len(v) == 2]
    order_ok = all(v["rdc"] <= v["pcc"] + 0.1 for v in matched)
    worst = max((v["rdc"] - v["pcc"]) for v in matched)
    ok = bound_ok and order_ok and len(matched) > 0
    report(10, "quantized rate ordering", ok,
           f"{len(matched)} matched points, worst rdc-pcc gap {worst:.2f} bits")
    assert ok


def test_c11_npd_dominance():
    psis = {"ld": [], "npd": []}
    for seed in range(20):
        config = ExperimentConfig(n=32, n_anomalies=50, master_seed=seed, workers=8)
        for record in run_experiment(config):
            if record.detector in psis:
                psis[record.detector].append(record.psi)
    mean_ld = float(np.mean(psis["ld"]))
    mean_npd = float(np.mean(psis["npd"]))
    ok = mean_npd >= mean_ld - 0.02
    report(11, "informed-detector dominance", ok,
           f"mean psi npd={mean_npd:.4f} ld={mean_ld:.4f}")
    assert ok


def test_c12_worker_determinism():
    texts = []
    for workers in (1, 4, 8):
        config = ExperimentConfig(master_seed=0, workers=workers)
        texts.append(render_csv(RUN_HEADER, run_rows(run_experiment(config)), 0))
    ok = texts[0] == texts[1] == texts[2]
    report(12, "byte-identical output across worker counts", ok,
           f"{len(texts[0])} bytes")
    assert ok
