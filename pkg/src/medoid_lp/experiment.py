"""Monte Carlo recovery experiments over (n, k, R, d, case) grids."""
from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import certificates
from .kmedoids import Clustering, brute_force_kmedoids, classify_recovery, solve_relaxation
from .lp import NumericalFailure
from .model import RadialLaw, dissimilarities, separated_balls

log = logging.getLogger(__name__)

MAX_POINTS = 90
THREADS_ENV = "MEDOID_LP_THREADS"

FULL_GRID = {
    "n": (5, 10, 15, 20, 25, 30),
    "k": (2, 3),
    "R": (2.0, 2.2, 2.4, 2.6, 2.8, 3.0, 3.2, 3.4, 3.6, 3.8, 4.0, 4.2, 4.4, 4.6, 4.8, 5.0),
    "d": (2, 3, 4, 10),
    "case": (1, 2),
}
# desk-scale stand-in: every n/k/d/case axis value kept at lower resolution
SCALED_GRID = {
    "n": (5, 10, 20),
    "k": (2, 3),
    "R": (2.0, 2.6, 3.0, 3.6, 4.2, 5.0),
    "d": (2, 4, 10),
    "case": (1, 2),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    n: tuple = SCALED_GRID["n"]
    k: tuple = SCALED_GRID["k"]
    R: tuple = SCALED_GRID["R"]
    d: tuple = SCALED_GRID["d"]
    case: tuple = SCALED_GRID["case"]
    trials: int = 20
    base_seed: int = 0
    metric: str = "squared"
    layout: str = "auto"
    certificates: tuple = ()
    brute_check: bool = False
    lp_method: Optional[str] = None
    output_dir: Optional[str] = None

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        for name in ("n", "k", "R", "d"):
            vals = getattr(self, name)
            if not vals or any(not v > 0 for v in vals):
                raise ConfigError(f"grid values for {name} must be positive")
        if any(c not in (1, 2) for c in self.case):
            raise ConfigError("case must be 1 or 2")
        for n in self.n:
            for k in self.k:
                if n * k > MAX_POINTS:
                    raise ConfigError(f"cell n={n}, k={k} has {n * k} points; limit is {MAX_POINTS}")
        bad = set(self.certificates) - set(certificates.CHECKS)
        if bad:
            raise ConfigError(f"unknown certificates {sorted(bad)}")

    def cells(self) -> list:
        return [
            (case, d, k, n, R)
            for case in self.case for d in self.d for k in self.k
            for n in self.n for R in self.R
        ]

    @classmethod
    def full(cls, **kw) -> "ExperimentConfig":
        return cls(**{**{a: FULL_GRID[a] for a in FULL_GRID}, **kw})

    @classmethod
    def scaled(cls, **kw) -> "ExperimentConfig":
        return cls(**{**{a: SCALED_GRID[a] for a in SCALED_GRID}, **kw})


_INT_KEYS = {"n", "k", "d", "case", "trials", "base_seed", "seed"}
_FLOAT_KEYS = {"R"}
_LIST_KEYS = {"n", "k", "R", "d", "case", "certificates"}


def parse_config(text: str, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    """Flat ``key=value`` lines; repeating a list key appends, commas also split.

    Example::

        n = 10
        n = 20
        R = 2.0, 3.0
        trials = 50
        certificates = prop1, cor4
    """
    lists: dict = {}
    scalars: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, val = (p.strip() for p in line.split("=", 1))
        if key == "seed":
            key = "base_seed"
        if key in _LIST_KEYS:
            items = [v.strip() for v in val.split(",") if v.strip()]
            conv = int if key in _INT_KEYS else float if key in _FLOAT_KEYS else str
            try:
                lists.setdefault(key, []).extend(conv(v) for v in items)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from None
        elif key in ("trials", "base_seed"):
            scalars[key] = int(val)
        elif key in ("metric", "layout", "lp_method", "output_dir"):
            scalars[key] = val
        elif key == "brute_check":
            scalars[key] = val.lower() in ("1", "true", "yes", "on")
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    cfg = base or ExperimentConfig()
    cfg = replace(cfg, **{k: tuple(v) for k, v in lists.items()}, **scalars)
    cfg.validate()
    return cfg


@dataclass
class TrialOutcome:
    label: str
    certs: dict = field(default_factory=dict)
    brute_mismatch: bool = False
    error: str = ""


@dataclass
class CellResult:
    case: int
    d: int
    k: int
    n: int
    R: float
    trials: int
    fractional: int = 0
    cluster_only: int = 0
    ball: int = 0
    solver_failures: int = 0
    cert_pass: dict = field(default_factory=dict)
    ball_without_prop1: int = 0
    brute_mismatches: int = 0
    wall_time: float = 0.0

    @property
    def failed_ball(self) -> int:
        return self.trials - self.ball

    @property
    def failed_cluster(self) -> int:
        return self.fractional + self.solver_failures

    def key(self) -> tuple:
        return (self.case, self.d, self.k, self.n, self.R)


def _cell_key(d: int, k: int, n: int, R: float) -> tuple:
    # case is left out on purpose: both radial laws consume the same uniforms,
    # which makes case comparisons paired (and identical at d = 2)
    return (n, k, int(round(R * 1000)), d)


def run_trial(cfg: ExperimentConfig, cell: tuple, trial: int) -> TrialOutcome:
    case, d, k, n, R = cell
    ps = separated_balls(n, k, d, R, RadialLaw.from_case(case), cfg.base_seed,
                         trial=trial, layout=cfg.layout, key=_cell_key(d, k, n, R))
    w = dissimilarities(ps, cfg.metric).w
    try:
        rr = solve_relaxation(w, k, method=cfg.lp_method)
    except (NumericalFailure, RuntimeError) as exc:
        return TrialOutcome("solver-failure", error=str(exc))
    outcome = classify_recovery(rr, ps.ball_of)
    res = TrialOutcome(outcome.label)
    if cfg.certificates:
        truth = Clustering.from_labels(w, ps.ball_of)
        for kind in cfg.certificates:
            try:
                rep = certificates.CHECKS[kind](w, truth)
                res.certs[kind] = rep.holds
            except (NumericalFailure, RuntimeError) as exc:
                log.warning("certificate %s failed on %s trial %d: %s", kind, cell, trial, exc)
                res.certs[kind] = False
    if cfg.brute_check and rr.integral:
        ex = brute_force_kmedoids(w, k)
        if abs(ex.best_objective - rr.objective) > 1e-7 * max(1.0, ex.best_objective):
            res.brute_mismatch = True
    return res


def run_cell(cfg: ExperimentConfig, cell: tuple) -> CellResult:
    case, d, k, n, R = cell
    t0 = time.perf_counter()
    out = CellResult(case=case, d=d, k=k, n=n, R=R, trials=cfg.trials,
                     cert_pass={kind: 0 for kind in cfg.certificates})
    for t in range(cfg.trials):
        tr = run_trial(cfg, cell, t)
        if tr.label == "fractional":
            out.fractional += 1
        elif tr.label == "cluster-recovery":
            out.cluster_only += 1
        elif tr.label == "ball-recovery":
            out.ball += 1
        else:
            out.solver_failures += 1
        for kind, ok in tr.certs.items():
            out.cert_pass[kind] += int(ok)
        if tr.label == "ball-recovery" and "prop1" in tr.certs and not tr.certs["prop1"]:
            out.ball_without_prop1 += 1
        out.brute_mismatches += int(tr.brute_mismatch)
    out.wall_time = time.perf_counter() - t0
    return out


def _cell_job(args):
    return run_cell(*args)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, min(os.cpu_count() or 1, 8))


def run_experiment(cfg: ExperimentConfig, workers: Optional[int] = None,
                   progress=None) -> list:
    """Run every cell; results come back in grid order whatever the worker count."""
    cfg.validate()
    cells = cfg.cells()
    workers = worker_count() if workers is None else max(1, workers)
    results = []
    if workers == 1 or len(cells) == 1:
        for cell in cells:
            results.append(run_cell(cfg, cell))
            if progress:
                progress(results[-1])
        return results
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for res in pool.map(_cell_job, [(cfg, c) for c in cells]):
            results.append(res)
            if progress:
                progress(res)
    return results


def summarize(results: list) -> dict:
    trials = sum(r.trials for r in results)
    failed_cluster = sum(r.failed_cluster for r in results)
    return {
        "cells": len(results),
        "trials": trials,
        "ball_recoveries": sum(r.ball for r in results),
        "failed_ball": sum(r.failed_ball for r in results),
        "failed_cluster": failed_cluster,
        "cluster_failure_rate": failed_cluster / trials if trials else float("nan"),
        "max_cell_failed_cluster": max((r.failed_cluster for r in results), default=0),
        "ball_without_prop1": sum(r.ball_without_prop1 for r in results),
        "brute_mismatches": sum(r.brute_mismatches for r in results),
    }


def by_key(results: list) -> dict:
    return {r.key(): r for r in results}


def failure_table(results: list) -> np.ndarray:
    """(cells, 7) array of case, d, k, n, R, failed ball, failed cluster."""
    return np.array([[r.case, r.d, r.k, r.n, r.R, r.failed_ball, r.failed_cluster]
                     for r in results], dtype=float)
