"""k-medoids as a binary program, its LP relaxation, and exact enumeration."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .lp import LE, EQ, LinearProgram, ProgramBuilder, solve_lp
from .model import DissimilarityMatrix

INTEGRAL_TOL = 1e-6
ENUMERATION_CAP = 10**7
# the relaxation at N > 20 goes to HiGHS by default; see solve_relaxation
SIMPLEX_MAX_N = 20


class ClusteringError(ValueError):
    pass


class EnumerationTooLarge(ValueError):
    pass


def _as_matrix(w) -> np.ndarray:
    return w.w if isinstance(w, DissimilarityMatrix) else np.asarray(w, dtype=float)


@dataclass
class Clustering:
    """Medoid set with nearest-medoid assignment (ties go to the lowest index)."""

    medoids: np.ndarray
    assign: np.ndarray

    @classmethod
    def from_medoids(cls, w, medoids: Sequence[int]) -> "Clustering":
        w = _as_matrix(w)
        med = np.array(sorted(int(m) for m in medoids), dtype=np.int64)
        if med.size == 0 or len(set(med.tolist())) != med.size:
            raise ClusteringError("medoid set must be non-empty and free of repeats")
        if med.min() < 0 or med.max() >= w.shape[0]:
            raise ClusteringError("medoid index out of range")
        assign = med[np.argmin(w[:, med], axis=1)]
        assign[med] = med  # a medoid is its own medoid even at zero-distance ties
        return cls(medoids=med, assign=assign)

    @classmethod
    def from_labels(cls, w, labels: Sequence[int]) -> "Clustering":
        """Best medoid per given group, then nearest-medoid assignment."""
        w = _as_matrix(w)
        labels = np.asarray(labels)
        meds = []
        for lab in np.unique(labels):
            members = np.flatnonzero(labels == lab)
            cost = w[np.ix_(members, members)].sum(axis=0)
            meds.append(int(members[np.argmin(cost)]))
        return cls.from_medoids(w, meds)

    @property
    def k(self) -> int:
        return int(self.medoids.size)

    @property
    def n_total(self) -> int:
        return int(self.assign.size)

    def clusters(self) -> dict:
        return {int(m): np.flatnonzero(self.assign == m) for m in self.medoids}

    def sizes(self) -> np.ndarray:
        """N_i: size of the cluster containing point i."""
        counts = {int(m): int(np.sum(self.assign == m)) for m in self.medoids}
        return np.array([counts[int(a)] for a in self.assign], dtype=np.int64)

    def second_medoid(self, w) -> np.ndarray:
        """M(i, 2), or -1 when there is only one medoid."""
        w = _as_matrix(w)
        if self.k == 1:
            return np.full(self.n_total, -1, dtype=np.int64)
        sub = w[:, self.medoids].copy()
        own = np.searchsorted(self.medoids, self.assign)
        sub[np.arange(self.n_total), own] = np.inf
        return self.medoids[np.argmin(sub, axis=1)]

    def second_gap(self, w) -> np.ndarray:
        """w[i, M(i,2)] - w[i, M(i)], +inf when k == 1."""
        w = _as_matrix(w)
        idx = np.arange(self.n_total)
        if self.k == 1:
            return np.full(self.n_total, np.inf)
        return w[idx, self.second_medoid(w)] - w[idx, self.assign]

    def objective(self, w) -> float:
        w = _as_matrix(w)
        return float(w[np.arange(self.n_total), self.assign].sum())

    def labels(self) -> np.ndarray:
        """Cluster label per point: rank of its medoid in the sorted medoid list."""
        return np.searchsorted(self.medoids, self.assign)

    def validate(self, w) -> None:
        w = _as_matrix(w)
        if not np.all(np.isin(self.assign, self.medoids)):
            raise ClusteringError("assignment points at a non-medoid")
        if not np.all(self.assign[self.medoids] == self.medoids):
            raise ClusteringError("a medoid must be assigned to itself")
        own = w[np.arange(self.n_total), self.assign]
        if np.any(own > w[:, self.medoids].min(axis=1) + 1e-12 * max(1.0, float(w.max()))):
            raise ClusteringError("assignment is not nearest-medoid")

    def z_matrix(self) -> np.ndarray:
        z = np.zeros((self.n_total, self.n_total))
        z[np.arange(self.n_total), self.assign] = 1.0
        return z

    def to_dict(self) -> dict:
        return {"medoids": self.medoids.tolist(), "assignment": self.assign.tolist()}


def var_name(i: int, j: int) -> str:
    return f"z_{i}_{j}"


def build_relaxation(w, k: int) -> LinearProgram:
    w = _as_matrix(w)
    N = w.shape[0]
    if not 1 <= k <= N:
        raise ValueError(f"k must lie in [1, {N}], got {k}")
    names = [var_name(i, j) for i in range(N) for j in range(N)]
    pb = ProgramBuilder(N * N, names=names)
    pb.c[:] = w.ravel()
    idx = np.arange(N * N).reshape(N, N)
    for i in range(N):
        pb.add_row(idx[i], 1.0, EQ, 1.0, name=f"assign_{i}")
    pb.add_row(np.diag(idx), 1.0, LE, float(k), name="budget")
    for i in range(N):
        for j in range(N):
            if i != j:
                pb.add_row([idx[i, j], idx[j, j]], [1.0, -1.0], LE, 0.0, name=f"open_{i}_{j}")
    return pb.build("min")


@dataclass
class RelaxationResult:
    z: np.ndarray
    objective: float
    integral: bool
    clustering: Optional[Clustering] = None
    method: str = ""
    iterations: int = 0

    def to_dict(self) -> dict:
        out = {
            "objective": self.objective,
            "integral": self.integral,
            "method": self.method,
            "medoids": None,
            "assignment": None,
        }
        if self.clustering is not None:
            out.update(self.clustering.to_dict())
        return out


def _default_method(N: int) -> str:
    return "simplex" if N <= SIMPLEX_MAX_N else "highs"


def solve_relaxation(w, k: int, method: Optional[str] = None) -> RelaxationResult:
    w = _as_matrix(w)
    N = w.shape[0]
    lp = build_relaxation(w, k)
    sol = solve_lp(lp, method=method or _default_method(N))
    if not sol.optimal:
        raise RuntimeError(f"the relaxation reported {sol.status}; the program is always feasible and bounded")
    z = sol.x.reshape(N, N)
    z = np.where(np.abs(z) < 1e-12, 0.0, z)
    integral = bool(np.all(np.minimum(np.abs(z), np.abs(z - 1.0)) <= INTEGRAL_TOL))
    clustering = None
    if integral:
        medoids = np.flatnonzero(np.diag(z) > 0.5)
        clustering = Clustering.from_medoids(w, medoids)
        if abs(clustering.objective(w) - sol.objective_value) > 1e-7 * max(1.0, abs(sol.objective_value)):
            raise RuntimeError("extracted clustering objective disagrees with the LP optimum")
    return RelaxationResult(z=z, objective=sol.objective_value, integral=integral,
                            clustering=clustering, method=sol.method, iterations=sol.iterations)


@dataclass
class ExactResult:
    best_objective: float
    optimal_medoid_sets: list = field(default_factory=list)

    @property
    def unique(self) -> bool:
        return len(self.optimal_medoid_sets) == 1

    def clustering(self, w) -> Clustering:
        return Clustering.from_medoids(w, self.optimal_medoid_sets[0])

    def to_dict(self) -> dict:
        return {
            "best_objective": self.best_objective,
            "optimal_medoid_sets": [list(s) for s in self.optimal_medoid_sets],
            "unique": self.unique,
        }


def brute_force_kmedoids(w, k: int, chunk: int = 20000) -> ExactResult:
    """Enumerate every k-subset of medoids; exact k-medoids optimum and all ties."""
    w = np.ascontiguousarray(_as_matrix(w))
    N = w.shape[0]
    if not 1 <= k <= N:
        raise ValueError(f"k must lie in [1, {N}], got {k}")
    total = math.comb(N, k)
    if total > ENUMERATION_CAP:
        raise EnumerationTooLarge(f"C({N},{k}) = {total} exceeds the cap {ENUMERATION_CAP}")
    combos = itertools.combinations(range(N), k)
    costs, sets = [], []
    while True:
        block = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, chunk)),
                            dtype=np.int64)
        if block.size == 0:
            break
        block = block.reshape(-1, k)
        costs.append(_kernels.subset_costs(w, block))
        sets.append(block)
    costs = np.concatenate(costs)
    sets = np.concatenate(sets)
    best = float(costs.min())
    tol = 1e-9 * max(1.0, abs(best))
    hits = np.flatnonzero(costs <= best + tol)
    return ExactResult(best_objective=best,
                       optimal_medoid_sets=[tuple(int(v) for v in sets[h]) for h in hits])


@dataclass
class RecoveryOutcome:
    label: str  # "fractional" | "cluster-recovery" | "ball-recovery"
    detail: list = field(default_factory=list)

    @property
    def cluster_recovered(self) -> bool:
        return self.label in ("cluster-recovery", "ball-recovery")

    @property
    def ball_recovered(self) -> bool:
        return self.label == "ball-recovery"


def _canonical(labels) -> tuple:
    """Relabel so the first point of each block gets the next integer."""
    seen: dict = {}
    return tuple(seen.setdefault(int(v), len(seen)) for v in labels)


def classify_recovery(rr: RelaxationResult, truth) -> RecoveryOutcome:
    truth = np.asarray(truth)
    if not rr.integral or rr.clustering is None:
        return RecoveryOutcome("fractional")
    found = rr.clustering.labels()
    if truth.shape[0] != found.shape[0]:
        raise ValueError("ground truth does not cover every point")
    if _canonical(found) == _canonical(truth):
        return RecoveryOutcome("ball-recovery")
    return RecoveryOutcome("cluster-recovery", detail=misplaced_points(found, truth))


def misplaced_points(found, truth) -> list:
    """Points outside the majority found-cluster of their ball."""
    found = np.asarray(found)
    truth = np.asarray(truth)
    bad = []
    claimed: set = set()
    for b in np.unique(truth):
        members = np.flatnonzero(truth == b)
        labs, counts = np.unique(found[members], return_counts=True)
        order = np.lexsort((labs, -counts))
        main = None
        for o in order:
            if int(labs[o]) not in claimed:
                main = int(labs[o])
                break
        if main is not None:
            claimed.add(main)
        bad.extend(int(i) for i in members if found[i] != main)
    return sorted(bad)
