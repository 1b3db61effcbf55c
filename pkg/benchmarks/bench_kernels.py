"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

The fallback is loaded directly from ``medoid_lp._kernels_py``; the compiled
side is skipped when the extension was not built.
"""
import argparse
import time

import numpy as np

from medoid_lp import _kernels_py as py
from medoid_lp.kmedoids import build_relaxation
from medoid_lp.lp.simplex import RevisedSimplex

try:
    from medoid_lp import _ckernels as cy
except ImportError:
    cy = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_eta(mod, m, pivots):
    rng = np.random.default_rng(0)
    binv = np.eye(m)
    cols = rng.standard_normal((pivots, m))

    def run():
        b = binv.copy()
        for t in range(pivots):
            a = cols[t].copy()
            p = t % m
            a[p] = 1.0 + abs(a[p])
            mod.eta_update(b, a, p)
    return run


def bench_subsets(mod, N, k):
    import itertools
    rng = np.random.default_rng(1)
    x = rng.random((N, 2))
    w = np.ascontiguousarray(((x[:, None] - x[None]) ** 2).sum(-1))
    subs = np.array(list(itertools.combinations(range(N), k)), dtype=np.int64)
    return lambda: mod.subset_costs(w, subs)


def bench_scan(mod, N, nu):
    rng = np.random.default_rng(2)
    base = -rng.random((N, N))
    inv = 1.0 / rng.integers(1, 10, N).astype(float)
    us = np.linspace(0.0, 5.0, nu)
    cols = np.arange(N, dtype=np.int64)
    return lambda: mod.positive_part_scan(us, inv, base, cols)


def bench_simplex(backend_mod, N):
    from medoid_lp import _kernels
    rng = np.random.default_rng(3)
    x = rng.random((N, 2))
    w = ((x[:, None] - x[None]) ** 2).sum(-1)
    lp = build_relaxation(w, 2)

    def run():
        saved = _kernels.eta_update
        _kernels.eta_update = backend_mod.eta_update
        try:
            RevisedSimplex(lp).solve()
        finally:
            _kernels.eta_update = saved
    return run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    cases = [
        ("eta_update m=60 x2000", lambda m: bench_eta(m, 60, 2000)),
        ("eta_update m=400 x200", lambda m: bench_eta(m, 400, 200)),
        ("subset_costs N=40 k=3", lambda m: bench_subsets(m, 40, 3)),
        ("positive_part_scan N=60 u=2000", lambda m: bench_scan(m, 60, 2000)),
        ("simplex relaxation N=20", lambda m: bench_simplex(m, 20)),
    ]
    print(f"{'kernel':34s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, make in cases:
        tp = best_of(make(py), args.repeat)
        if cy is None:
            print(f"{name:34s} {tp:11.4f} {'n/a':>11s}")
            continue
        tc = best_of(make(cy), args.repeat)
        print(f"{name:34s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
