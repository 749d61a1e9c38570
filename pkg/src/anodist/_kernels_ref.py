"""Pure-numpy reference implementations of the hot kernels.

Used when the compiled extension is unavailable (or disabled via the
ANODIST_PURE_PYTHON environment variable).  Both backends must return
bit-identical results: the Mann-Whitney numerator is an exact integer pair
count in either implementation.
"""

from __future__ import annotations

import numpy as np


def mw_numerator(scores_ok: np.ndarray, scores_ko: np.ndarray) -> int:
    """2 * #{(i,j): ko_j > ok_i} + #{(i,j): ko_j == ok_i} as an exact integer."""
    ok_sorted = np.sort(scores_ok)
    left = np.searchsorted(ok_sorted, scores_ko, side="left")
    right = np.searchsorted(ok_sorted, scores_ko, side="right")
    wins = int(np.sum(left, dtype=np.int64))
    ties = int(np.sum(right - left, dtype=np.int64))
    return 2 * wins + ties


def weighted_sumsq_rows(y: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Per-row weighted sum of squares: out[i] = sum_j weights[j] * y[i,j]**2."""
    return (y * y) @ weights
