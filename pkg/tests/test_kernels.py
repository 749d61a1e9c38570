"""Backend equivalence for the two hot kernels."""
import os
import subprocess
import sys

import numpy as np
import pytest

from anodist import _kernels_ref, kernels

try:
    from anodist import _fastkern
except ImportError:  # pragma: no cover - exercised only on broken builds
    _fastkern = None

needs_compiled = pytest.mark.skipif(_fastkern is None, reason="compiled extension not built")


def brute_numerator(ok, ko):
    wins = sum(1 for a in ok for b in ko if b > a)
    ties = sum(1 for a in ok for b in ko if b == a)
    return 2 * wins + ties


def test_reference_numerator_matches_brute_force():
    rng = np.random.default_rng(10)
    for _ in range(50):
        # small integer support forces plenty of ties
        ok = rng.integers(0, 6, size=rng.integers(1, 40)).astype(float)
        ko = rng.integers(0, 6, size=rng.integers(1, 40)).astype(float)
        assert _kernels_ref.mw_numerator(ok, ko) == brute_numerator(ok, ko)


@needs_compiled
def test_backends_agree_exactly_on_numerator():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n_ok = int(rng.integers(1, 300))
        n_ko = int(rng.integers(1, 300))
        if rng.random() < 0.5:
            ok = rng.integers(0, 8, size=n_ok).astype(float)
            ko = rng.integers(0, 8, size=n_ko).astype(float)
        else:
            ok = rng.standard_normal(n_ok)
            ko = rng.standard_normal(n_ko)
        ref = _kernels_ref.mw_numerator(ok, ko)
        fast = _fastkern.mw_numerator(ok, ko)
        assert fast == ref
        assert isinstance(int(fast), int)


@needs_compiled
def test_backends_agree_on_weighted_sumsq():
    rng = np.random.default_rng(12)
    for _ in range(30):
        rows = int(rng.integers(1, 200))
        cols = int(rng.integers(1, 40))
        y = rng.standard_normal((rows, cols))
        w = rng.uniform(0.1, 5.0, size=cols)
        ref = _kernels_ref.weighted_sumsq_rows(y, w)
        fast = _fastkern.weighted_sumsq_rows(y, w)
        assert np.allclose(fast, ref, rtol=1e-12, atol=0.0)


def test_wrapper_auc_values():
    assert kernels.mann_whitney_auc([1.2, 0.8], [2.0, 1.5, 0.9]) == pytest.approx(5.0 / 6.0)
    # ties count half: brute value 0.75
    assert kernels.mann_whitney_auc([0.0, 1.0, 1.0, 2.0], [1.0, 3.0]) == pytest.approx(0.75)
    assert kernels.mann_whitney_auc([0.0], [0.0]) == pytest.approx(0.5)


def test_wrapper_weighted_sumsq_is_quadratic_form():
    rng = np.random.default_rng(13)
    y = rng.standard_normal((20, 5))
    w = rng.uniform(0.5, 2.0, size=5)
    out = kernels.weighted_sumsq_rows(y, w)
    want = np.einsum("ij,j,ij->i", y, w, y)
    assert np.allclose(out, want, rtol=1e-12)


def test_backend_is_reported():
    assert kernels.BACKEND in ("compiled", "fallback")


def test_env_var_forces_fallback():
    code = (
        "from anodist import kernels; "
        "print(kernels.BACKEND); "
        "print(kernels.mann_whitney_auc([1.0, 2.0], [1.5, 3.0]))"
    )
    env = dict(os.environ, ANODIST_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    lines = out.stdout.split()
    assert lines[0] == "fallback"
    assert float(lines[1]) == pytest.approx(0.75)
