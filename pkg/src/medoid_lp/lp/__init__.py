"""Linear-programming core: program types, solvers, LP-file text I/O."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .program import (
    EQ,
    GE,
    LE,
    LinearProgram,
    LPError,
    LPSolution,
    NumericalFailure,
    ProgramBuilder,
    from_dense,
)
from .simplex import RevisedSimplex
from .lpformat import export_lp_text, parse_lp_text, read_solution_csv, write_solution_csv

METHODS = ("simplex", "highs")


def solve_lp(lp: LinearProgram, method: str = "simplex", **options) -> LPSolution:
    """Solve ``lp`` and return a basic (vertex) optimal solution when one exists.

    ``method="simplex"`` runs the in-package revised simplex; ``"highs"`` hands
    the same program to HiGHS' dual simplex through scipy, which is faster on
    the larger experiment instances. Both return basic solutions and both are
    checked by the same residual computation.
    """
    if method == "simplex":
        sol = RevisedSimplex(lp, **options).solve()
    elif method == "highs":
        sol = _solve_highs(lp)
    else:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if sol.optimal:
        verify(lp, sol)
    return sol


def verify(lp: LinearProgram, sol: LPSolution) -> dict:
    """Independent residual check of an optimal solution; raises on failure."""
    res = lp.residuals(sol.x)
    primal = max(res["rows"], res["bounds"])
    # complementary slackness on rows: multiplier * row slack
    slack = lp.b - lp.A @ sol.x
    cs = float(np.max(np.abs(sol.duals * slack))) if lp.n_rows else 0.0
    scale = max(1.0, abs(sol.objective_value))
    checks = {
        "primal_residual": primal,
        "row_cs_residual": cs / scale,
        "duality_gap": (sol.objective_value - sol.dual_objective) / scale,
    }
    sol.checks.update(checks)
    if primal > 1e-8:
        raise NumericalFailure(f"primal residual {primal:.3e} after solve")
    if checks["row_cs_residual"] > 1e-7:
        raise NumericalFailure(f"complementary slackness residual {cs:.3e}")
    return checks


def _solve_highs(lp: LinearProgram) -> LPSolution:
    from scipy.optimize import linprog

    rel = np.asarray(lp.relations)
    A = lp.A.tocsr()
    sign = 1.0 if lp.sense == "min" else -1.0
    le, ge, eq = rel == LE, rel == GE, rel == EQ
    ub_rows = np.flatnonzero(le | ge)
    ub_sign = np.where(ge[ub_rows], -1.0, 1.0)
    A_ub = sp.diags(ub_sign) @ A[ub_rows] if ub_rows.size else None
    b_ub = ub_sign * lp.b[ub_rows] if ub_rows.size else None
    eq_rows = np.flatnonzero(eq)
    A_eq = A[eq_rows] if eq_rows.size else None
    b_eq = lp.b[eq_rows] if eq_rows.size else None
    bounds = [
        (None if not np.isfinite(lo) else lo, None if not np.isfinite(hi) else hi)
        for lo, hi in zip(lp.lower, lp.upper)
    ]
    res = linprog(sign * lp.c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=bounds, method="highs-ds")
    if res.status == 2:
        return LPSolution(status="infeasible", method="highs")
    if res.status == 3:
        return LPSolution(status="unbounded", method="highs")
    if res.status != 0:
        raise NumericalFailure(f"HiGHS failed: {res.message}")
    duals = np.zeros(lp.n_rows)
    if ub_rows.size:
        duals[ub_rows] = sign * ub_sign * res.ineqlin.marginals
    if eq_rows.size:
        duals[eq_rows] = sign * res.eqlin.marginals
    x = np.asarray(res.x, dtype=float)
    lo_m = getattr(res, "lower", None)
    up_m = getattr(res, "upper", None)
    dual_obj = float(duals @ lp.b)
    if lo_m is not None:
        lo = np.where(np.isfinite(lp.lower), lp.lower, 0.0)
        hi = np.where(np.isfinite(lp.upper), lp.upper, 0.0)
        dual_obj += sign * float(lo_m.marginals @ lo + up_m.marginals @ hi)
    return LPSolution(
        status="optimal", x=x, objective_value=lp.objective(x), duals=duals,
        vertex_flag=True, dual_objective=dual_obj, iterations=int(res.nit), method="highs",
    )


__all__ = [
    "EQ", "GE", "LE", "LinearProgram", "LPError", "LPSolution", "NumericalFailure",
    "ProgramBuilder", "RevisedSimplex", "export_lp_text", "from_dense", "parse_lp_text",
    "read_solution_csv", "solve_lp", "verify", "write_solution_csv",
]
