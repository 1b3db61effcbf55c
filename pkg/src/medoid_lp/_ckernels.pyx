# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``.

Sums accumulate left to right, so totals may differ from the numpy fallback
in the last few ulps.
"""
import numpy as np
cimport numpy as cnp
from scipy.linalg.cython_blas cimport dger

cnp.import_array()


def eta_update(double[:, ::1] binv, const double[::1] alpha, Py_ssize_t p):
    # rank-one update through BLAS dger on the transposed (column-major) view
    cdef int m = <int>binv.shape[0]
    cdef int one = 1
    cdef int j
    cdef double piv = alpha[p]
    cdef double neg = -1.0
    rowp_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] rowp = rowp_arr
    for j in range(m):
        rowp[j] = binv[p, j] / piv
    if m > 0:
        dger(&m, &m, &neg, &rowp[0], &one, <double*>&alpha[0], &one, &binv[0, 0], &m)
    for j in range(m):
        binv[p, j] = rowp[j]


def subset_costs(const double[:, ::1] w, const cnp.int64_t[:, ::1] subsets):
    cdef Py_ssize_t s_count = subsets.shape[0]
    cdef Py_ssize_t k = subsets.shape[1]
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t s, i, t
    cdef double best, v, total
    out = np.empty(s_count, dtype=np.float64)
    cdef double[::1] o = out
    for s in range(s_count):
        total = 0.0
        for i in range(n):
            best = w[i, subsets[s, 0]]
            for t in range(1, k):
                v = w[i, subsets[s, t]]
                if v < best:
                    best = v
            total += best
        o[s] = total
    return out


def positive_part_scan(const double[::1] us, const double[::1] inv_sizes,
                       const double[:, ::1] base, const cnp.int64_t[::1] nonmedoid_cols):
    cdef Py_ssize_t n_u = us.shape[0]
    cdef Py_ssize_t n = base.shape[0]
    cdef Py_ssize_t n_cols = nonmedoid_cols.shape[0]
    cdef Py_ssize_t t, i, c, j
    cdef double u, col_sum, f, v
    out = np.empty(n_u, dtype=np.float64)
    cdef double[::1] o = out
    for t in range(n_u):
        u = us[t]
        f = 0.0
        for c in range(n_cols):
            j = nonmedoid_cols[c]
            col_sum = 0.0
            for i in range(n):
                v = base[i, j] + u * inv_sizes[i]
                if v > 0.0:
                    col_sum += v
            if c == 0 or col_sum > f:
                f = col_sum
        o[t] = f - u
    return out
