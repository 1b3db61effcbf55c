"""Numeric evaluation of the separated-balls recovery guarantee and of the
medoid concentration bounds it rests on, plus a Monte Carlo check of those bounds.

Logarithms are natural throughout.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .model import RadialLaw, sample_ball, stream

BASE_SEPARATION = 3.75
EMPIRICAL_CAP = 20000


class GuaranteeError(ValueError):
    pass


@dataclass(frozen=True)
class GuaranteeQuery:
    R: float
    n: int
    k: int
    d: int = 2

    @classmethod
    def from_epsilon(cls, eps: float, n: int, k: int, d: int = 2) -> "GuaranteeQuery":
        return cls(R=BASE_SEPARATION + eps, n=n, k=k, d=d)

    def validate(self) -> None:
        if self.n < 3 or self.k < 2 or self.d < 2 or not self.R > 0:
            raise GuaranteeError(f"need n >= 3, k >= 2, d >= 2, R > 0; got {self}")


@dataclass
class GuaranteeReport:
    query: GuaranteeQuery
    rho: float
    alpha: float
    u_bound: float
    slacks: dict
    conditions: dict
    probability_floor: float
    satisfied: bool
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["query"] = asdict(self.query)
        return out


def rho(n: float) -> float:
    """High-probability bound on a medoid's distance from its ball center."""
    return 3.0 * math.sqrt(2.0 * math.log(n) / (n - 2.0))


def _terms(R: float, n: float, k: int) -> tuple:
    r = rho(n)
    inner = R - 1.0 - 2.0 * math.sqrt(1.0 + r)
    outer_frac = max(1.0 - inner * inner, 0.0)
    n_outer = n * outer_frac + math.sqrt((n / 2.0) * math.log(n))
    collinear = (1.0 + r) ** 2 - (R - 2.0) ** 2 + 4.0 - (1.0 - r) ** 2
    lhs = n_outer * (k - 1) * collinear
    m = min(inner, 1.0)
    q = math.sqrt((n - 2.0) / n)
    rhs = ((n - 2.0) * m * m
           - 2.0 * math.sqrt(2.0 * (n - 2.0) * math.log(n)) * m
           - 2.0 * q * (2.0 + q) * math.log(n))
    return r, inner, lhs, rhs


def check_guarantee(q: GuaranteeQuery) -> GuaranteeReport:
    """Evaluate the four sufficient conditions of the recovery guarantee."""
    q.validate()
    n, k, d, R = float(q.n), q.k, q.d, float(q.R)
    r, inner, lhs, rhs = _terms(R, n, k)
    slacks = {
        "dimension": 9.0 / 8.0 * (n - 2.0) / math.log(n) - d,
        "separation": R - (1.0 + r + 2.0 * math.sqrt(1.0 + r)),
        "inner_radius": inner - r / 3.0,
        "concentration": rhs - lhs,
    }
    conditions = {
        "dimension": slacks["dimension"] >= 0.0,
        "separation": slacks["separation"] > 0.0,
        "inner_radius": slacks["inner_radius"] > 0.0,
        # printed as a non-strict inequality
        "concentration": slacks["concentration"] >= 0.0,
    }
    return GuaranteeReport(
        query=q,
        rho=r,
        alpha=math.sqrt(2.0 * math.log(n)),
        u_bound=n * (4.0 - (1.0 - r) ** 2),
        slacks=slacks,
        conditions=conditions,
        probability_floor=1.0 - 4.0 * k / n,
        satisfied=all(conditions.values()),
        notes=["probability floor is the headline 1 - 4k/n; the derivation's own "
               "bookkeeping reaches 1 - 2k/n"],
    )


@dataclass(frozen=True)
class ConcentrationBounds:
    n: int
    d: int
    alpha: float
    alpha_max: float
    min_norm_bound: float
    medoid_norm_bound: float
    prob_floor: float


def alpha_max(n: int, d: int) -> float:
    return 1.5 * math.sqrt((n - 2.0) / (2.0 * d))


def default_alpha(n: int) -> float:
    return math.sqrt(2.0 * math.log(n))


def concentration_bounds(n: int, d: int, alpha: Optional[float] = None) -> ConcentrationBounds:
    if n < 3 or d < 2:
        raise GuaranteeError(f"need n >= 3 and d >= 2, got n={n}, d={d}")
    a = default_alpha(n) if alpha is None else float(alpha)
    amax = alpha_max(n, d)
    if not 0.0 < a <= amax:
        raise GuaranteeError(f"alpha={a:g} outside (0, {amax:g}] for n={n}, d={d}")
    return ConcentrationBounds(
        n=n, d=d, alpha=a, alpha_max=amax,
        min_norm_bound=a / math.sqrt(n),
        medoid_norm_bound=3.0 * a / math.sqrt(n - 2.0),
        prob_floor=1.0 - n * math.exp(-a * a),
    )


def squared_distance_sums(x: np.ndarray, block: int = 256) -> np.ndarray:
    """sum_j ||x_j - x_i||^2 for every i, by explicit pairwise differences."""
    n = x.shape[0]
    out = np.empty(n)
    for s in range(0, n, block):
        diff = x[s:s + block, None, :] - x[None, :, :]
        out[s:s + block] = np.einsum("ijk,ijk->i", diff, diff)
    return out


def medoid_index(x: np.ndarray, brute: bool = True) -> int:
    """Exact medoid under squared distances.

    ``brute=False`` uses n||x_i||^2 - 2 x_i.sum(x) + const, which is the same
    objective up to a constant and costs O(n d).
    """
    if brute:
        return int(np.argmin(squared_distance_sums(x)))
    sq = np.einsum("ij,ij->i", x, x)
    return int(np.argmin(x.shape[0] * sq - 2.0 * x @ x.sum(axis=0)))


def validate_concentration_empirically(n: int, d: int, reps: int, seed: int,
                                law: RadialLaw = RadialLaw.QUADRATIC,
                                alpha: Optional[float] = None, n_ell: int = 20,
                                brute: bool = True) -> dict:
    """Sample ``reps`` balls of ``n`` points and count violations of the three
    concentration statements. Points are measured from the ball center."""
    bounds = concentration_bounds(n, d, alpha)
    if n > EMPIRICAL_CAP:
        raise GuaranteeError(f"n={n} exceeds the brute-force cap {EMPIRICAL_CAP}")
    a = bounds.alpha
    fails = {"statement1": 0, "statement2": 0, "statement3": 0, "any": 0}
    worst = {"min_norm": 0.0, "medoid_norm": 0.0, "statement1_slack": math.inf}
    origin = np.zeros(d)
    for rep in range(reps):
        rng = np.random.default_rng(stream(seed, rep))
        x = sample_ball(origin, n, law, rng)
        norms = np.linalg.norm(x, axis=1)
        i_min = int(np.argmin(norms))
        sums = squared_distance_sums(x) if brute else None
        i_med = int(np.argmin(sums)) if brute else medoid_index(x, brute=False)
        bad = False
        if norms[i_min] > bounds.min_norm_bound:
            fails["statement2"] += 1
            bad = True
        if norms[i_med] > bounds.medoid_norm_bound:
            fails["statement3"] += 1
            bad = True
        worst["min_norm"] = max(worst["min_norm"], float(norms[i_min]))
        worst["medoid_norm"] = max(worst["medoid_norm"], float(norms[i_med]))
        ells = rng.choice(n, size=min(n_ell, n), replace=False)
        s1_ok = True
        for ell in ells:
            d_ell = _dist_sum(x, ell, sums)
            d_med = _dist_sum(x, i_med, sums)
            d_min = _dist_sum(x, i_min, sums)
            first = d_ell - d_med
            second = d_ell - d_min
            third = ((n - 2) * (norms[ell] ** 2 - norms[i_min] ** 2)
                     - 2.0 * a * math.sqrt(n - 2) * (norms[ell] + norms[i_min]))
            tol = 1e-9 * max(1.0, abs(d_ell))
            worst["statement1_slack"] = min(worst["statement1_slack"], float(second - third))
            if first < second - tol or second < third - tol:
                s1_ok = False
        if not s1_ok:
            fails["statement1"] += 1
            bad = True
        fails["any"] += int(bad)
    return {
        "n": n, "d": d, "reps": reps, "alpha": a, "law": law.name.lower(),
        "failures": fails, "worst": worst,
        "allowed_failure_probability": n * math.exp(-a * a),
        "bounds": asdict(bounds),
    }


def _dist_sum(x, i, sums) -> float:
    if sums is not None:
        return float(sums[i])
    diff = x - x[i]
    return float(np.einsum("ij,ij->", diff, diff))


def min_norm_failure_rate(n: int, reps: int, seed: int, alpha: Optional[float] = None,
                          law: RadialLaw = RadialLaw.QUADRATIC, d: int = 2,
                          chunk: int = 10000) -> dict:
    """Monte Carlo frequency of ||x_min|| > alpha / sqrt(n).

    Only radii matter, so directions are not drawn.
    """
    a = default_alpha(n) if alpha is None else float(alpha)
    thr = a / math.sqrt(n)
    fails = 0
    done = 0
    block = 0
    while done < reps:
        m = min(chunk, reps - done)
        rng = np.random.default_rng(stream(seed, block))
        r = law.radius(rng.random((m, n)), d)
        fails += int(np.sum(r.min(axis=1) > thr))
        done += m
        block += 1
    rate = fails / reps
    return {
        "n": n, "reps": reps, "alpha": a, "failures": fails, "rate": rate,
        "exact_probability": (1.0 - a * a / n) ** n if law is RadialLaw.QUADRATIC else None,
        "bound": math.exp(-a * a),
    }
