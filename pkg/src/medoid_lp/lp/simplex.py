"""Dense revised simplex with an explicit basis inverse.

Two-phase method. Pricing is Dantzig's rule for a bounded number of pivots
(or until a long degenerate stall), then Bland's rule, which cannot cycle.
The ratio test always breaks ties by lowest variable index, so identical
input gives identical pivots.
"""
from __future__ import annotations

import logging

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .. import _kernels
from .program import EQ, GE, LE, LinearProgram, LPSolution, NumericalFailure

log = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
OPT_TOL = 1e-9
CS_TOL = 1e-7
REFACTOR_EVERY = 400


class _StandardForm:
    """min c.x, A x = b, x >= 0, b >= 0, with the map back to the original."""

    def __init__(self, lp: LinearProgram):
        n = lp.n_vars
        lo, hi = lp.lower, lp.upper
        c = lp.c if lp.sense == "min" else -lp.c

        # structural columns: x = shift + T @ xs
        t_rows, t_cols, t_vals = [], [], []
        shift = np.zeros(n)
        ub_rows = []  # (std column, bound width)
        col = 0
        for j in range(n):
            if np.isfinite(lo[j]):
                shift[j] = lo[j]
                t_rows.append(j), t_cols.append(col), t_vals.append(1.0)
                if np.isfinite(hi[j]):
                    ub_rows.append((col, hi[j] - lo[j]))
                col += 1
            elif np.isfinite(hi[j]):
                shift[j] = hi[j]
                t_rows.append(j), t_cols.append(col), t_vals.append(-1.0)
                col += 1
            else:
                t_rows += [j, j]
                t_cols += [col, col + 1]
                t_vals += [1.0, -1.0]
                col += 2
        n_struct = col
        T = sp.csr_matrix((t_vals, (t_rows, t_cols)), shape=(n, n_struct))

        A_s = (lp.A @ T).tocsr()
        b_s = lp.b - lp.A @ shift
        rel = list(lp.relations)
        if ub_rows:
            cols = [cb for cb, _ in ub_rows]
            extra = sp.csr_matrix(
                (np.ones(len(cols)), (np.arange(len(cols)), cols)), shape=(len(cols), n_struct)
            )
            A_s = sp.vstack([A_s, extra]).tocsr()
            b_s = np.concatenate([b_s, [width for _, width in ub_rows]])
            rel += [LE] * len(ub_rows)
        m = A_s.shape[0]

        # slacks: +1 for <=, -1 for >=
        slack_rows = [i for i, r in enumerate(rel) if r != EQ]
        slack_sign = np.array([1.0 if rel[i] == LE else -1.0 for i in slack_rows])
        n_slack = len(slack_rows)
        S = sp.csr_matrix((slack_sign, (slack_rows, np.arange(n_slack))), shape=(m, n_slack))

        flip = np.where(b_s < 0, -1.0, 1.0)
        D = sp.diags(flip)
        A_full = (D @ sp.hstack([A_s, S])).tocsc()
        b_full = flip * b_s

        # initial basis: a slack with +1 after the flip, else an artificial
        basis = np.full(m, -1, dtype=np.int64)
        for s_idx, i in enumerate(slack_rows):
            if slack_sign[s_idx] * flip[i] > 0:
                basis[i] = n_struct + s_idx
        art_rows = np.flatnonzero(basis < 0)
        n_art = art_rows.shape[0]
        base_cols = n_struct + n_slack
        Art = sp.csr_matrix((np.ones(n_art), (art_rows, np.arange(n_art))), shape=(m, n_art))
        basis[art_rows] = base_cols + np.arange(n_art)

        self.A = sp.hstack([A_full, Art]).tocsc()
        self.AT = self.A.T.tocsr()
        self.b = b_full
        self.c = np.concatenate([T.T @ c, np.zeros(n_slack + n_art)])
        self.m = m
        self.n_struct = n_struct
        self.n_real = base_cols
        self.n_total = base_cols + n_art
        self.basis0 = basis
        self.T = T
        self.shift = shift
        self.flip = flip
        self.n_orig_rows = lp.n_rows
        self.const = float(c @ shift)
        self.sign = 1.0 if lp.sense == "min" else -1.0

    def to_original(self, xs: np.ndarray) -> np.ndarray:
        return self.shift + self.T @ xs[: self.n_struct]


class RevisedSimplex:
    def __init__(self, lp: LinearProgram, max_iter: int | None = None,
                 dantzig_limit: int | None = None):
        self.lp = lp
        self.sf = _StandardForm(lp)
        sf = self.sf
        size = sf.m + sf.n_total
        self.max_iter = max_iter if max_iter is not None else 50 * size + 1000
        self.dantzig_limit = dantzig_limit if dantzig_limit is not None else 20 * size + 100
        self.stall_limit = 5 * sf.m + 50
        self.basis = sf.basis0.copy()
        self.binv = np.eye(sf.m)
        self.xb = sf.b.copy()
        self.iterations = 0
        self.use_bland = False
        self._since_refactor = 0
        self._stall = 0

    # -- linear algebra ---------------------------------------------------
    def _refactor(self):
        sf = self.sf
        if sf.m == 0:
            return
        B = sf.A[:, self.basis].tocsc()
        lu = spla.splu(B)
        self.binv = np.ascontiguousarray(lu.solve(np.eye(sf.m)))
        self.xb = self.binv @ sf.b
        self.xb[np.abs(self.xb) < 1e-13] = 0.0
        self._since_refactor = 0

    def _column(self, q):
        a = self.sf.A
        start, end = a.indptr[q], a.indptr[q + 1]
        rows = a.indices[start:end]
        vals = a.data[start:end]
        return self.binv[:, rows] @ vals

    # -- main loop --------------------------------------------------------
    def _phase(self, cost, allowed, pin_artificials):
        """Run simplex pivots for ``cost``; returns 'optimal' or 'unbounded'."""
        sf = self.sf
        art_start = sf.n_real if pin_artificials else sf.n_total
        y = cost[self.basis] @ self.binv
        while True:
            if self.iterations >= self.max_iter:
                raise NumericalFailure(f"iteration limit {self.max_iter} reached")
            d = cost - sf.AT @ y
            d[self.basis] = 0.0
            d[~allowed] = 0.0
            if not self.use_bland and self.iterations >= self.dantzig_limit:
                self.use_bland = True
            if self.use_bland:
                cand = np.flatnonzero(d < -OPT_TOL)
                if cand.size == 0:
                    return "optimal"
                q = int(cand[0])
            else:
                q = int(np.argmin(d))
                if d[q] >= -OPT_TOL:
                    return "optimal"
            alpha = self._column(q)
            p = self._ratio_test(alpha, art_start)
            if p < 0:
                return "unbounded"
            theta = self.xb[p] / alpha[p]
            if theta <= 0.0:
                self._stall += 1
                if self._stall > self.stall_limit:
                    self.use_bland = True
            else:
                self._stall = 0
            self.xb -= theta * alpha
            self.xb[p] = theta
            np.maximum(self.xb, 0.0, out=self.xb, where=self.xb > -FEAS_TOL)
            self.xb[np.abs(self.xb) < 1e-14] = 0.0
            dq = d[q]
            _kernels.eta_update(self.binv, alpha, p)
            self.basis[p] = q
            self.iterations += 1
            self._since_refactor += 1
            if self._since_refactor >= REFACTOR_EVERY:
                self._refactor()
                y = cost[self.basis] @ self.binv
            else:
                y = y + dq * self.binv[p]

    def _ratio_test(self, alpha, art_start):
        basis = self.basis
        pos = alpha > PIVOT_TOL
        # basic artificials sit at zero and must not move off it
        art = (basis >= art_start) & (np.abs(alpha) > PIVOT_TOL) & ~pos
        cand = np.flatnonzero(pos | art)
        if cand.size == 0:
            return -1
        ratios = np.maximum(self.xb[cand] / np.abs(alpha[cand]), 0.0)
        rmin = ratios.min()
        ties = cand[ratios <= rmin + 1e-12 * max(1.0, rmin)]
        return int(ties[np.argmin(basis[ties])])

    def _drive_out_artificials(self):
        sf = self.sf
        for p in np.flatnonzero(self.basis >= sf.n_real):
            row = self.binv[p] @ sf.A[:, : sf.n_real]
            row = np.asarray(row).ravel()
            row[self.basis[self.basis < sf.n_real]] = 0.0
            cand = np.flatnonzero(np.abs(row) > 1e-7)
            if cand.size == 0:
                continue  # redundant row; artificial stays basic at zero
            q = int(cand[0])
            alpha = self._column(q)
            theta = self.xb[p] / alpha[p]
            self.xb -= theta * alpha
            self.xb[p] = theta
            _kernels.eta_update(self.binv, alpha, p)
            self.basis[p] = q
            self.iterations += 1
        self._refactor()

    def solve(self) -> LPSolution:
        sf = self.sf
        lp = self.lp
        if sf.m == 0:
            return self._solve_unconstrained()
        allowed = np.ones(sf.n_total, dtype=bool)
        if sf.n_total > sf.n_real:
            cost1 = np.zeros(sf.n_total)
            cost1[sf.n_real:] = 1.0
            self._phase(cost1, allowed, pin_artificials=False)
            self._refactor()
            infeas = float(self.xb[self.basis >= sf.n_real].sum())
            if infeas > FEAS_TOL * max(1.0, np.abs(sf.b).max()):
                return LPSolution(status="infeasible", iterations=self.iterations, method="simplex")
            self._drive_out_artificials()
            allowed[sf.n_real:] = False
        status = self._phase(sf.c, allowed, pin_artificials=True)
        if status == "unbounded":
            return LPSolution(status="unbounded", iterations=self.iterations, method="simplex")
        self._refactor()
        sol = self._extract()
        if sol.checks["primal_residual"] > FEAS_TOL:
            raise NumericalFailure(
                f"primal residual {sol.checks['primal_residual']:.3e} exceeds {FEAS_TOL:g}"
            )
        return sol

    def _solve_unconstrained(self):
        sf = self.sf
        if np.any(sf.c < -OPT_TOL):
            return LPSolution(status="unbounded", method="simplex")
        xs = np.zeros(sf.n_total)
        x = sf.to_original(xs)
        obj = self.lp.objective(x)
        return LPSolution(
            status="optimal", x=x, objective_value=obj, duals=np.zeros(0), vertex_flag=True,
            dual_objective=obj, method="simplex", basis=np.zeros(0, dtype=np.int64),
            checks={"primal_residual": 0.0, "dual_residual": 0.0, "cs_residual": 0.0},
        )

    def _extract(self) -> LPSolution:
        sf = self.sf
        lp = self.lp
        xs = np.zeros(sf.n_total)
        xs[self.basis] = self.xb
        x = sf.to_original(xs)
        y_std = sf.c[self.basis] @ self.binv
        # multipliers of the original rows, in the sense of the original program
        duals = sf.sign * sf.flip[: sf.n_orig_rows] * y_std[: sf.n_orig_rows]
        dual_obj = sf.sign * (float(y_std @ sf.b) + sf.const)
        obj = lp.objective(x)
        d = sf.c - sf.A.T @ y_std
        d_real = d[: sf.n_real]
        res = lp.residuals(x)
        checks = {
            "primal_residual": max(res["rows"], res["bounds"]),
            "dual_residual": float(max(0.0, -d_real.min())) if d_real.size else 0.0,
            "cs_residual": float(np.max(np.abs(d_real * xs[: sf.n_real]))) if d_real.size else 0.0,
        }
        return LPSolution(
            status="optimal", x=x, objective_value=obj, duals=duals, vertex_flag=True,
            dual_objective=dual_obj, iterations=self.iterations, method="simplex",
            basis=self.basis.copy(), checks=checks,
        )
