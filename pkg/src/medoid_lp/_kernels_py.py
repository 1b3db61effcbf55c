"""Pure numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
Results agree to rounding, not bit for bit: BLAS may fuse multiply-adds and
numpy sums pairwise (checked in tests/test_kernels.py).
"""
import numpy as np
from scipy.linalg import blas


def eta_update(binv, alpha, p):
    """In-place product-form pivot of an explicit basis inverse on row ``p``."""
    piv = alpha[p]
    rowp = binv[p] / piv
    # rank-one update in place; binv.T is the Fortran view BLAS expects
    out = blas.dger(-1.0, rowp, alpha, a=binv.T, overwrite_a=True)
    if not np.shares_memory(out, binv):
        binv[...] = out.T
    binv[p] = rowp


def subset_costs(w, subsets):
    """Total nearest-medoid cost of each row of ``subsets`` (int64, shape (s, k))."""
    out = np.empty(subsets.shape[0])
    for s in range(subsets.shape[0]):
        cols = w[:, subsets[s]]
        out[s] = cols.min(axis=1).sum()
    return out


def positive_part_scan(us, inv_sizes, base, nonmedoid_cols):
    """g(u) = max_j sum_i (u/N_i + base[i, j])_+ - u for each u in ``us``.

    ``base[i, j]`` holds w[i, M(i)] - w[i, j]; only columns listed in
    ``nonmedoid_cols`` take part in the max.  With no such columns the max
    is taken as 0.
    """
    out = np.empty(us.shape[0])
    sub = base[:, nonmedoid_cols]
    for t in range(us.shape[0]):
        u = us[t]
        if sub.shape[1]:
            shifted = sub + (u * inv_sizes)[:, None]
            f = np.maximum(shifted, 0.0).sum(axis=0).max()
        else:
            f = 0.0
        out[t] = f - u
    return out
