# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Mann-Whitney pair counting and batch quadratic forms.

Semantics must match anodist._kernels_ref exactly; the AUC numerator is an
integer in both backends, so the two agree bit for bit.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def mw_numerator(scores_ok, scores_ko):
    """2 * #{(i,j): ko_j > ok_i} + #{(i,j): ko_j == ok_i} as an exact integer."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ok = np.sort(
        np.ascontiguousarray(scores_ok, dtype=np.float64))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ko = np.sort(
        np.ascontiguousarray(scores_ko, dtype=np.float64))
    cdef Py_ssize_t n_ok = ok.shape[0]
    cdef Py_ssize_t n_ko = ko.shape[0]
    cdef Py_ssize_t lt = 0, le = 0, j
    cdef long long numerator = 0
    cdef double v
    for j in range(n_ko):
        v = ko[j]
        while lt < n_ok and ok[lt] < v:
            lt += 1
        if le < lt:
            le = lt
        while le < n_ok and ok[le] <= v:
            le += 1
        numerator += 2 * <long long>lt + <long long>(le - lt)
    return numerator


def weighted_sumsq_rows(y, weights):
    """Per-row weighted sum of squares: out[i] = sum_j weights[j] * y[i,j]**2."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ym = np.ascontiguousarray(y, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] wm = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t rows = ym.shape[0]
    cdef Py_ssize_t cols = ym.shape[1]
    if wm.shape[0] != cols:
        raise ValueError("weights length does not match row width")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(rows, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double acc, v
    for i in range(rows):
        acc = 0.0
        for j in range(cols):
            v = ym[i, j]
            acc += wm[j] * v * v
        out[i] = acc
    return out
