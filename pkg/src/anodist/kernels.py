"""Backend selection for the hot kernels.

The compiled extension is preferred when it imported cleanly; setting the
environment variable ANODIST_PURE_PYTHON=1 before import forces the numpy
fallback.  ``BACKEND`` names the active implementation.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_ref

__all__ = ["BACKEND", "mann_whitney_auc", "weighted_sumsq_rows"]

if os.environ.get("ANODIST_PURE_PYTHON", "") == "1":
    _impl = _kernels_ref
    BACKEND = "fallback"
else:
    try:
        from . import _fastkern as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_ref
        BACKEND = "fallback"


def mann_whitney_auc(scores_ok, scores_ko) -> float:
    """Fraction of (ok, ko) pairs with ko score above the ok score, ties half.

    Exact: the pair count is integer arithmetic in both backends and every
    per-pair contribution is a multiple of one half.
    """
    ok = np.ascontiguousarray(scores_ok, dtype=np.float64)
    ko = np.ascontiguousarray(scores_ko, dtype=np.float64)
    numerator = _impl.mw_numerator(ok, ko)
    return numerator / (2.0 * ok.size * ko.size)


def weighted_sumsq_rows(y, weights) -> np.ndarray:
    """out[i] = sum_j weights[j] * y[i,j]**2 for a (rows, cols) batch."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    return _impl.weighted_sumsq_rows(y, weights)
