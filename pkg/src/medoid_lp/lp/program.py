"""Value types for linear programs and their solutions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

LE, EQ, GE = "<=", "=", ">="
RELATIONS = (LE, EQ, GE)


class LPError(Exception):
    """Malformed linear program."""


class NumericalFailure(Exception):
    """Raised when a solve cannot reach the feasibility tolerance."""


@dataclass(frozen=True)
class LinearProgram:
    """min/max c.x subject to rows A x (<=|=|>=) b and lo <= x <= hi.

    ``A`` is held as a CSR matrix; the relaxation at N=90 has 8100 columns and
    a dense copy would not fit comfortably in memory.
    """

    c: np.ndarray
    A: sp.csr_matrix
    relations: tuple
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    sense: str = "min"
    names: Optional[tuple] = None
    row_names: Optional[tuple] = None

    def __post_init__(self):
        n = self.c.shape[0]
        if n < 1:
            raise LPError("program needs at least one variable")
        if self.A.shape[1] != n:
            raise LPError(f"constraint rows have {self.A.shape[1]} columns, expected {n}")
        m = self.A.shape[0]
        if len(self.relations) != m or self.b.shape[0] != m:
            raise LPError("relations/rhs length does not match row count")
        if any(r not in RELATIONS for r in self.relations):
            raise LPError(f"unknown relation in {set(self.relations)}")
        if not np.all(np.isfinite(self.b)):
            raise LPError("rhs must be finite")
        if self.lower.shape[0] != n or self.upper.shape[0] != n:
            raise LPError("bounds length does not match variable count")
        if np.any(self.lower > self.upper):
            raise LPError("lower bound exceeds upper bound")
        if self.sense not in ("min", "max"):
            raise LPError(f"sense must be 'min' or 'max', got {self.sense!r}")
        if self.names is not None and len(self.names) != n:
            raise LPError("names length does not match variable count")

    @property
    def n_vars(self) -> int:
        return self.c.shape[0]

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def objective(self, x: np.ndarray) -> float:
        return float(self.c @ x)

    def residuals(self, x: np.ndarray) -> dict:
        """Scaled primal infeasibilities of ``x``: rows and bounds."""
        ax = self.A @ x
        scale = np.ones(self.n_rows)
        if self.n_rows:
            rowmax = abs(self.A).max(axis=1).toarray().ravel()
            scale = np.maximum(1.0, np.maximum(rowmax, np.abs(self.b)))
        rel = np.asarray(self.relations)
        viol = np.zeros(self.n_rows)
        diff = ax - self.b
        viol[rel == LE] = np.maximum(diff[rel == LE], 0.0)
        viol[rel == GE] = np.maximum(-diff[rel == GE], 0.0)
        viol[rel == EQ] = np.abs(diff[rel == EQ])
        row_res = float(np.max(viol / scale)) if self.n_rows else 0.0
        lo = np.where(np.isfinite(self.lower), self.lower - x, 0.0)
        hi = np.where(np.isfinite(self.upper), x - self.upper, 0.0)
        bound_res = float(max(np.max(lo), np.max(hi), 0.0))
        return {"rows": row_res, "bounds": bound_res}


@dataclass
class LPSolution:
    status: str
    x: Optional[np.ndarray] = None
    objective_value: float = float("nan")
    duals: Optional[np.ndarray] = None
    vertex_flag: bool = False
    dual_objective: float = float("nan")
    iterations: int = 0
    method: str = ""
    basis: Optional[np.ndarray] = None
    checks: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class ProgramBuilder:
    """Incremental row-by-row construction of a :class:`LinearProgram`."""

    def __init__(self, n_vars: int, names: Optional[Sequence[str]] = None):
        self.n = n_vars
        self.c = np.zeros(n_vars)
        self.lower = np.zeros(n_vars)
        self.upper = np.full(n_vars, np.inf)
        self.names = tuple(names) if names is not None else None
        self._rows, self._cols, self._vals = [], [], []
        self._rel, self._rhs, self._row_names = [], [], []

    def add_row(self, cols, vals, relation: str, rhs: float, name: Optional[str] = None) -> int:
        r = len(self._rhs)
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.broadcast_to(np.asarray(vals, dtype=float), cols.shape)
        self._rows.append(np.full(cols.shape[0], r, dtype=np.int64))
        self._cols.append(cols)
        self._vals.append(np.array(vals))
        self._rel.append(relation)
        self._rhs.append(float(rhs))
        self._row_names.append(name if name is not None else f"c{r + 1}")
        return r

    def build(self, sense: str = "min") -> LinearProgram:
        m = len(self._rhs)
        if m:
            rows = np.concatenate(self._rows)
            cols = np.concatenate(self._cols)
            vals = np.concatenate(self._vals)
        else:
            rows = cols = np.zeros(0, dtype=np.int64)
            vals = np.zeros(0)
        A = sp.csr_matrix((vals, (rows, cols)), shape=(m, self.n))
        A.sum_duplicates()
        return LinearProgram(
            c=self.c.copy(),
            A=A,
            relations=tuple(self._rel),
            b=np.asarray(self._rhs, dtype=float),
            lower=self.lower.copy(),
            upper=self.upper.copy(),
            sense=sense,
            names=self.names,
            row_names=tuple(self._row_names),
        )


def from_dense(c, A_rows, relations, b, lower=None, upper=None, sense="min", names=None) -> LinearProgram:
    """Convenience constructor from dense row lists."""
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    A = np.asarray(A_rows, dtype=float).reshape(-1, n) if len(A_rows) else np.zeros((0, n))
    return LinearProgram(
        c=c,
        A=sp.csr_matrix(A),
        relations=tuple(relations),
        b=np.asarray(b, dtype=float),
        lower=np.zeros(n) if lower is None else np.asarray(lower, dtype=float),
        upper=np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=float),
        sense=sense,
        names=tuple(names) if names is not None else None,
    )
