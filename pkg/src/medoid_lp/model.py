"""Separated-balls instances: ball centers, radial sampling laws, dissimilarities."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

SQUARED = "squared-euclidean"
EUCLIDEAN = "euclidean"
METRIC_ALIASES = {"sq": SQUARED, "squared": SQUARED, SQUARED: SQUARED,
                  "euclidean": EUCLIDEAN, "eu": EUCLIDEAN, "l2": EUCLIDEAN}


class LayoutError(ValueError):
    pass


class RadialLaw(Enum):
    """Radius distribution of a sample around its ball center.

    UNIFORM (case 1) has CDF r**d; QUADRATIC (case 2) has CDF r**2, which
    coincides with the uniform ball when d == 2.
    """

    UNIFORM = 1
    QUADRATIC = 2

    @classmethod
    def from_case(cls, case: int) -> "RadialLaw":
        return cls(int(case))

    def radius(self, u, d: int):
        u = np.asarray(u, dtype=float)
        if self is RadialLaw.QUADRATIC or d == 2:
            return np.sqrt(u)
        return u ** (1.0 / d)

    def cdf(self, r, d: int):
        r = np.clip(np.asarray(r, dtype=float), 0.0, 1.0)
        return r**2 if self is RadialLaw.QUADRATIC else r**d


@dataclass
class PointSet:
    points: np.ndarray  # (N, d)
    ball_of: np.ndarray  # (N,) int
    centers: np.ndarray  # (k, d)
    separation: float = float("nan")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_total(self) -> int:
        return self.points.shape[0]

    def partition(self) -> list:
        return [np.flatnonzero(self.ball_of == b) for b in np.unique(self.ball_of)]

    def check(self, tol: float = 1e-12) -> None:
        """Raise if any point is outside its unit ball or centers are too close."""
        if self.centers.shape[0]:
            off = np.linalg.norm(self.points - self.centers[self.ball_of], axis=1)
            if np.any(off > 1.0 + tol):
                raise ValueError(f"point {int(np.argmax(off))} lies outside its unit ball")
        if np.isfinite(self.separation) and self.centers.shape[0] > 1:
            dc = np.linalg.norm(self.centers[:, None] - self.centers[None], axis=2)
            dc = dc[~np.eye(len(dc), dtype=bool)]
            if dc.min() < self.separation - 1e-9 * max(1.0, self.separation):
                raise ValueError("ball centers closer than the declared separation")


def place_ball_centers(k: int, d: int, R: float, layout: str = "simplex") -> np.ndarray:
    if k < 1 or d < 2:
        raise LayoutError(f"need k >= 1 and d >= 2, got k={k}, d={d}")
    centers = np.zeros((k, d))
    if layout == "line":
        centers[:, 0] = R * np.arange(k)
        return centers
    if layout != "simplex":
        raise LayoutError(f"unknown layout {layout!r}")
    if k > d + 1:
        raise LayoutError(f"a regular simplex of {k} vertices needs d >= {k - 1}, got d={d}")
    # vertex m sits above the centroid of vertices 0..m-1, in a fresh axis
    for m in range(1, k):
        centroid = centers[:m].mean(axis=0)
        circ2 = float(np.sum((centers[0] - centroid) ** 2))
        centers[m] = centroid
        centers[m, m - 1] = np.sqrt(R * R - circ2)
    return centers


def _unit_directions(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_ball(center, n: int, law: RadialLaw, seed) -> np.ndarray:
    """``n`` isotropic samples around ``center`` with radii drawn from ``law``.

    ``seed`` is anything ``numpy.random.default_rng`` accepts (an int, a
    SeedSequence, or a tuple of ints via :func:`stream`).
    """
    center = np.asarray(center, dtype=float)
    d = center.shape[0]
    if n < 1:
        raise ValueError("n must be >= 1")
    if d < 1:
        raise ValueError("invalid dimension")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dirs = _unit_directions(rng, n, d)
    r = law.radius(rng.random(n), d)
    pts = center + r[:, None] * dirs
    return pts


def stream(base_seed: int, *keys: int) -> np.random.SeedSequence:
    """Independent RNG stream for (base_seed, trial, ball, ...)."""
    return np.random.SeedSequence(entropy=int(base_seed), spawn_key=tuple(int(k) for k in keys))


def separated_balls(n: int, k: int, d: int, R: float, law: RadialLaw, seed: int,
                    trial: int = 0, layout: str = "auto", key: tuple = ()) -> PointSet:
    """k unit balls with centers exactly R apart (simplex layout when it fits).

    Ball b of trial t draws from ``stream(seed, *key, t, b)``.
    """
    if layout == "auto":
        layout = "simplex" if k <= d + 1 else "line"
    centers = place_ball_centers(k, d, R, layout)
    pts = [sample_ball(centers[b], n, law, stream(seed, *key, trial, b)) for b in range(k)]
    return PointSet(
        points=np.vstack(pts),
        ball_of=np.repeat(np.arange(k), n),
        centers=centers,
        separation=float(R),
    )


def normalize_metric(tag: str) -> tuple:
    """Return (canonical tag, exponent) for 'sq', 'euclidean', 'power-3', ..."""
    t = tag.strip().lower()
    if t in METRIC_ALIASES:
        canon = METRIC_ALIASES[t]
        return canon, 2.0 if canon == SQUARED else 1.0
    if t.startswith("power-") or t.startswith("power:") or t.startswith("p="):
        p = float(t.split("-", 1)[1] if "-" in t else t.split(":", 1)[-1].split("=", 1)[-1])
        if not p > 0:
            raise ValueError("power exponent must be positive")
        return f"power-{p:g}", p
    raise ValueError(f"unknown metric {tag!r}")


@dataclass
class DissimilarityMatrix:
    w: np.ndarray
    metric_tag: str = SQUARED

    @property
    def n_total(self) -> int:
        return self.w.shape[0]

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("dissimilarity matrix must be square")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("dissimilarities must be finite and nonnegative")
        if not np.array_equal(w, w.T):
            raise ValueError("dissimilarity matrix must be symmetric")
        if np.any(np.diag(w) != 0):
            raise ValueError("dissimilarity matrix must have a zero diagonal")
        self.w = w


def dissimilarities(points, metric_tag: str = SQUARED) -> DissimilarityMatrix:
    pts = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=float)
    if pts.shape[0] < 2:
        raise ValueError("need at least two points")
    canon, p = normalize_metric(metric_tag)
    diff = pts[:, None, :] - pts[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    sq = 0.5 * (sq + sq.T)
    if canon == SQUARED:
        w = sq
    elif canon == EUCLIDEAN:
        w = np.sqrt(sq)
    else:
        w = np.sqrt(sq) ** p
    np.fill_diagonal(w, 0.0)
    return DissimilarityMatrix(w=w, metric_tag=canon)


# -- CSV ---------------------------------------------------------------------

def pointset_to_csv(ps: PointSet) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["dim", "ball"] + [f"x{c}" for c in range(ps.dim)])
    for x, b in zip(ps.points, ps.ball_of):
        wr.writerow([ps.dim, int(b)] + [repr(float(v)) for v in x])
    return buf.getvalue()


def pointset_from_csv(text: str) -> PointSet:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [h.strip() for h in rows[0][:2]] != ["dim", "ball"]:
        raise ValueError("point CSV must start with header 'dim,ball,...'")
    pts, balls = [], []
    for row in rows[1:]:
        if not row:
            continue
        d = int(row[0])
        coords = [float(v) for v in row[2:2 + d]]
        if len(coords) != d:
            raise ValueError(f"row has {len(coords)} coordinates, expected {d}")
        pts.append(coords)
        balls.append(int(row[1]))
    pts_arr = np.asarray(pts, dtype=float)
    ball_of = np.asarray(balls, dtype=np.int64)
    k = int(ball_of.max()) + 1 if ball_of.size else 0
    centers = np.vstack([pts_arr[ball_of == b].mean(axis=0) if np.any(ball_of == b)
                         else np.zeros(pts_arr.shape[1]) for b in range(k)])
    # centers are unknown on read; the ball means stand in and `check` is skipped
    return PointSet(points=pts_arr, ball_of=ball_of, centers=centers)


def matrix_to_csv(w: np.ndarray) -> str:
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in w)


def matrix_from_csv(text: str, metric_tag: str = "custom") -> DissimilarityMatrix:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    return DissimilarityMatrix(w=np.asarray([[float(v) for v in r] for r in rows]), metric_tag=metric_tag)


def line_points(xs: Sequence[float]) -> np.ndarray:
    """Embed 1-D coordinates as an (N, 1) point array."""
    return np.asarray(xs, dtype=float).reshape(-1, 1)
