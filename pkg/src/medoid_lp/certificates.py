"""Dual certificates for exact recovery of a k-medoids clustering by the LP relaxation.

All four checks take the dissimilarities and a candidate clustering and
report a *margin*: the smallest slack over the certificate's strict
inequalities. ``holds`` is ``margin > STRICT_TOL``.

Notation used throughout: ``p[i, j] = w[i, j] - w[i, M(i)]`` is the extra
cost of reassigning point i to j, ``N_i`` the size of i's cluster and
``gap_i = w[i, M(i, 2)] - w[i, M(i)]`` (infinite with one medoid).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .kmedoids import Clustering, ClusteringError, _as_matrix, _default_method
from .lp import EQ, LE, ProgramBuilder, solve_lp

STRICT_TOL = 1e-9


@dataclass
class CertificateReport:
    kind: str
    holds: bool
    margin: float
    witness: Optional[dict] = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, float) and not math.isfinite(v):
                return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
            if isinstance(v, np.ndarray):
                return [enc(float(x)) for x in v]
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items()}
            if isinstance(v, (np.floating,)):
                return enc(float(v))
            if isinstance(v, (np.integer,)):
                return int(v)
            return v

        return enc({
            "kind": self.kind,
            "holds": self.holds,
            "margin": float(self.margin),
            "witness": self.witness,
            "diagnostics": self.diagnostics,
        })


class _Setup:
    """Quantities shared by the checks, computed once per (w, clustering)."""

    def __init__(self, w, c: Clustering):
        w = _as_matrix(w)
        if c.n_total != w.shape[0]:
            raise ClusteringError("clustering size does not match the dissimilarity matrix")
        c.validate(w)
        N = w.shape[0]
        self.w = w
        self.c = c
        self.N = N
        self.own = w[np.arange(N), c.assign]
        self.p = w - self.own[:, None]
        self.sizes = c.sizes().astype(float)
        self.gap = c.second_gap(w)
        self.is_medoid = np.zeros(N, dtype=bool)
        self.is_medoid[c.medoids] = True
        self.nonmedoids = np.flatnonzero(~self.is_medoid)
        self.same = c.assign[:, None] == c.assign[None, :]
        self.scaled = self.sizes[:, None] * self.p  # N_i * p[i, j]


def check_dual_certificate(w, c: Clustering, method: Optional[str] = None) -> CertificateReport:
    """Necessary and sufficient certificate, decided by a margin-maximizing LP.

    maximize g over (u, lam, t, g):
        t[i, j] >= lam_i - p[i, j],  t >= 0       for all i, j not a medoid
        sum_i t[i, j] <= u - g                     for j not a medoid
        sum_{i in S_m} lam_i = u                   for each medoid m
        0 <= lam_i <= gap_i - g                    (row dropped when gap_i = inf)
    The clustering is certified iff the optimum g* is positive.
    """
    s = _Setup(w, c)
    N = s.N
    cols_j = s.nonmedoids
    J = cols_j.size
    # variable layout: u | lam[0:N] | t[i, j-index] | g
    iu, il, it = 0, 1, 1 + N
    ig = it + N * J
    names = ["u"] + [f"lam_{i}" for i in range(N)]
    names += [f"t_{i}_{j}" for i in range(N) for j in cols_j] + ["g"]
    pb = ProgramBuilder(ig + 1, names=names)
    pb.lower[ig] = -np.inf
    pb.c[ig] = 1.0
    for i in range(N):
        for a, j in enumerate(cols_j):
            pb.add_row([il + i, it + i * J + a], [1.0, -1.0], LE, s.p[i, j], name=f"pos_{i}_{j}")
    for a, j in enumerate(cols_j):
        tcols = it + np.arange(N) * J + a
        pb.add_row(np.concatenate([tcols, [iu, ig]]),
                   np.concatenate([np.ones(N), [-1.0, 1.0]]), LE, 0.0, name=f"col_{j}")
    for m, members in s.c.clusters().items():
        pb.add_row(np.concatenate([il + members, [iu]]),
                   np.concatenate([np.ones(members.size), [-1.0]]), EQ, 0.0, name=f"vote_{m}")
    for i in range(N):
        if np.isfinite(s.gap[i]):
            pb.add_row([il + i, ig], [1.0, 1.0], LE, s.gap[i], name=f"gap_{i}")
    lp = pb.build("max")
    sol = solve_lp(lp, method=method or _default_method(N))
    if sol.status == "unbounded":
        # nothing constrains the margin (a single point)
        return CertificateReport("prop1", True, math.inf,
                                 witness={"u": 0.0, "lambda": np.zeros(N)},
                                 diagnostics={"lp_status": "unbounded"})
    if not sol.optimal:
        raise RuntimeError(f"certificate LP reported {sol.status}")
    x = sol.x
    g = float(x[ig])
    u = float(x[iu])
    lam = np.maximum(x[il:il + N], 0.0)
    holds = g > STRICT_TOL
    diag = {"lp_method": sol.method}
    # report the binding inequalities of the optimal vertex
    col_slack = [u - float(np.maximum(lam - s.p[:, j], 0.0).sum()) for j in cols_j]
    gap_slack = s.gap - lam
    if J:
        a = int(np.argmin(col_slack))
        diag["tightest_column"] = int(cols_j[a])
        diag["column_slack"] = col_slack[a]
    if np.any(np.isfinite(gap_slack)):
        i = int(np.argmin(gap_slack))
        diag["tightest_point"] = i
        diag["gap_slack"] = float(gap_slack[i])
    witness = {"u": u, "lambda": lam} if holds else None
    return CertificateReport("prop1", holds, g, witness=witness, diagnostics=diag)


def prop1_conditions(w, c: Clustering, u: float, lam) -> float:
    """Margin of a given (u, lambda) pair against the strict system directly.

    Independent of the LP: used to confirm witnesses.
    """
    s = _Setup(w, c)
    lam = np.asarray(lam, dtype=float)
    slacks = [np.inf]
    for j in s.nonmedoids:
        slacks.append(u - float(np.maximum(lam - s.p[:, j], 0.0).sum()))
    for m, members in s.c.clusters().items():
        if abs(float(lam[members].sum()) - u) > 1e-9 * max(1.0, abs(u)):
            return -np.inf
    if np.any(lam < -1e-12):
        return -np.inf
    slacks.append(float(np.min(s.gap - lam)))
    return float(min(slacks))


def democratic_objective(s: _Setup, us: np.ndarray) -> np.ndarray:
    """g(u) = max_j sum_i (u/N_i + w[i, M(i)] - w[i, j])_+ - u at each u."""
    base = np.ascontiguousarray(-s.p)
    inv = 1.0 / s.sizes
    return _kernels.positive_part_scan(np.ascontiguousarray(us, dtype=float), inv, base,
                                       s.nonmedoids.astype(np.int64))


def check_democratic_certificate(w, c: Clustering) -> CertificateReport:
    """Sufficient certificate with lambda_i = u / N_i; exact convex breakpoint scan."""
    s = _Setup(w, c)
    u_max = float(np.min(s.sizes * s.gap))  # inf when k == 1
    bp = (s.sizes[:, None] * s.p)[:, s.nonmedoids].ravel()
    hi = u_max if np.isfinite(u_max) else (float(bp.max()) + 1.0 if bp.size else 1.0)
    bp = np.clip(bp, 0.0, hi)
    us = np.unique(np.concatenate([bp, [0.0, hi]]))
    g = democratic_objective(s, us)
    a = int(np.argmin(g))
    u_star = float(us[a])
    margin = -float(g[a])
    holds = margin > STRICT_TOL and 0.0 < u_star
    if u_star <= 0.0:
        margin = min(margin, 0.0)
    diag = {"u_max": u_max, "breakpoints": int(us.size)}
    witness = None
    if holds:
        witness = {"u": u_star, "lambda": u_star / s.sizes}
    return CertificateReport("cor2", holds, margin, witness=witness, diagnostics=diag)


def check_threshold_certificate(w, c: Clustering) -> CertificateReport:
    """Thresholding certificate: every scaled same-cluster cost below every
    scaled cross-cluster cost."""
    s = _Setup(w, c)
    same_vals = np.where(s.same, s.scaled, -np.inf)
    diff_vals = np.where(~s.same, s.scaled, np.inf)
    i_s, j_s = np.unravel_index(int(np.argmax(same_vals)), same_vals.shape)
    i_d, j_d = np.unravel_index(int(np.argmin(diff_vals)), diff_vals.shape)
    lo = float(same_vals[i_s, j_s])
    hi = float(diff_vals[i_d, j_d])
    margin = hi - lo
    diag = {
        "max_within": lo, "within_pair": [int(i_s), int(j_s)],
        "min_across": hi, "across_pair": [int(i_d), int(j_d)],
    }
    return CertificateReport("cor3", margin > STRICT_TOL, margin, diagnostics=diag)


def check_max_u_certificate(w, c: Clustering) -> CertificateReport:
    """Certificate with u pinned at the largest scaled within-cluster cost."""
    s = _Setup(w, c)
    if s.c.k < 2:
        raise ClusteringError("this certificate needs at least two medoids")
    same_vals = np.where(s.same, s.scaled, -np.inf)
    u = float(same_vals.max())
    bound = s.sizes * s.gap
    first = bound - u
    i_worst = int(np.argmin(first))
    slacks = [float(first[i_worst])]
    worst_j, worst_col = -1, np.inf
    for j in s.nonmedoids:
        across = ~s.same[:, j]
        lhs = float(np.maximum(u / s.sizes[across] - s.p[across, j], 0.0).sum())
        rhs = float(s.p[~across, j].sum())
        if rhs - lhs < worst_col:
            worst_col, worst_j = rhs - lhs, int(j)
    if worst_j >= 0:
        slacks.append(worst_col)
    margin = min(slacks)
    holds = margin > STRICT_TOL
    diag = {"u": u, "tightest_point": i_worst, "point_slack": slacks[0]}
    if worst_j >= 0:
        diag["tightest_column"] = worst_j
        diag["column_slack"] = worst_col
    witness = {"u": u, "lambda": u / s.sizes} if holds else None
    return CertificateReport("cor4", holds, margin, witness=witness, diagnostics=diag)


CHECKS = {
    "prop1": check_dual_certificate,
    "cor2": check_democratic_certificate,
    "cor3": check_threshold_certificate,
    "cor4": check_max_u_certificate,
}


def check_all(w, c: Clustering, kinds=("prop1", "cor2", "cor3", "cor4")) -> dict:
    out = {}
    for kind in kinds:
        if kind == "cor4" and c.k < 2:
            continue
        out[kind] = CHECKS[kind](w, c)
    return out
