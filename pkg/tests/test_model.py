import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from medoid_lp.model import (LayoutError, PointSet, RadialLaw, dissimilarities, matrix_from_csv,
                             matrix_to_csv, normalize_metric, place_ball_centers,
                             pointset_from_csv, pointset_to_csv, sample_ball, separated_balls)


def pairwise(c):
    d = np.linalg.norm(c[:, None] - c[None], axis=2)
    return d[~np.eye(len(c), dtype=bool)]


def test_single_center_line():
    np.testing.assert_array_equal(place_ball_centers(1, 2, 5.0, "line"), [[0.0, 0.0]])


def test_two_centers_simplex():
    c = place_ball_centers(2, 2, 3.0, "simplex")
    assert np.linalg.norm(c[1] - c[0]) == pytest.approx(3.0, abs=1e-12)


def test_triangle_is_equilateral():
    c = place_ball_centers(3, 2, 2.0, "simplex")
    np.testing.assert_allclose(pairwise(c), 2.0, atol=1e-12)


@given(k=st.integers(1, 6), extra=st.integers(0, 4), R=st.floats(0.5, 20.0))
def test_simplex_layout_exact_for_any_k(k, extra, R):
    d = max(2, k - 1 + extra)
    c = place_ball_centers(k, d, R)
    if k > 1:
        np.testing.assert_allclose(pairwise(c), R, rtol=1e-12)


def test_line_layout_min_distance():
    c = place_ball_centers(4, 2, 2.5, "line")
    assert pairwise(c).min() == pytest.approx(2.5)
    np.testing.assert_array_equal(c[:, 1], 0.0)


def test_simplex_too_many_centers():
    with pytest.raises(LayoutError):
        place_ball_centers(4, 2, 3.0, "simplex")


def test_inverse_cdf_examples():
    assert RadialLaw.QUADRATIC.radius(0.25, 5) == pytest.approx(0.5)
    assert RadialLaw.UNIFORM.radius(0.25, 2) == pytest.approx(0.5)
    assert RadialLaw.UNIFORM.radius(0.125, 3) == pytest.approx(0.5)


def test_case2_survival_at_08():
    x = sample_ball(np.zeros(4), 100_000, RadialLaw.QUADRATIC, 11)
    frac = np.mean(np.linalg.norm(x, axis=1) >= 0.8)
    assert abs(frac - 0.36) <= 0.01


@pytest.mark.parametrize("law,d", [(RadialLaw.QUADRATIC, 4), (RadialLaw.UNIFORM, 3),
                                   (RadialLaw.UNIFORM, 10)])
def test_radius_ks_distance(law, d):
    r = np.sort(np.linalg.norm(sample_ball(np.zeros(d), 100_000, law, 3), axis=1))
    F = law.cdf(r, d)
    m = r.size
    ks = max(np.max(np.arange(1, m + 1) / m - F), np.max(F - np.arange(m) / m))
    assert ks < 0.01


def test_isotropy():
    x = sample_ball(np.zeros(3), 100_000, RadialLaw.QUADRATIC, 5)
    dirs = x / np.linalg.norm(x, axis=1, keepdims=True)
    assert np.linalg.norm(dirs.mean(axis=0)) < 0.02


@given(seed=st.integers(0, 2**32), d=st.integers(2, 8), case=st.sampled_from([1, 2]))
@settings(max_examples=30)
def test_samples_inside_ball_and_reproducible(seed, d, case):
    center = np.arange(d, dtype=float)
    a = sample_ball(center, 50, RadialLaw.from_case(case), seed)
    b = sample_ball(center, 50, RadialLaw.from_case(case), seed)
    assert np.array_equal(a, b)
    assert np.all(np.linalg.norm(a - center, axis=1) <= 1.0)


def test_cases_coincide_in_two_dimensions():
    a = separated_balls(10, 2, 2, 3.0, RadialLaw.UNIFORM, 4)
    b = separated_balls(10, 2, 2, 3.0, RadialLaw.QUADRATIC, 4)
    assert np.array_equal(a.points, b.points)


def test_separated_balls_check_and_streams():
    ps = separated_balls(8, 3, 2, 2.2, RadialLaw.UNIFORM, 9, trial=2)
    ps.check()
    assert ps.n_total == 24 and ps.dim == 2
    other = separated_balls(8, 3, 2, 2.2, RadialLaw.UNIFORM, 9, trial=3)
    assert not np.array_equal(ps.points, other.points)
    # line layout is used automatically when the simplex does not fit
    wide = separated_balls(4, 4, 2, 3.0, RadialLaw.UNIFORM, 0)
    np.testing.assert_array_equal(wide.centers[:, 1], 0.0)


def test_dissimilarity_examples():
    pts = np.array([[0.0, 0.0], [3.0, 4.0]])
    assert dissimilarities(pts, "sq").w[0, 1] == 25.0
    assert dissimilarities(pts, "euclidean").w[0, 1] == 5.0


def test_power_metric_matches_cubes():
    rng = np.random.default_rng(0)
    x = rng.random((3, 2))
    d = np.sqrt(((x[:, None] - x[None]) ** 2).sum(-1))
    w = dissimilarities(x, "power-3").w
    np.testing.assert_allclose(w, d**3, rtol=1e-12)
    assert np.array_equal(w, w.T) and np.all(np.diag(w) == 0)


def test_metric_names():
    assert normalize_metric("sq")[1] == 2.0
    assert normalize_metric("power-1.5") == ("power-1.5", 1.5)
    with pytest.raises(ValueError):
        normalize_metric("manhattan")


def test_dissimilarity_rejects_bad_matrix():
    from medoid_lp.model import DissimilarityMatrix
    with pytest.raises(ValueError):
        DissimilarityMatrix(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ValueError):
        DissimilarityMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))


def test_csv_round_trips():
    ps = separated_balls(4, 2, 3, 3.0, RadialLaw.UNIFORM, 1)
    text = pointset_to_csv(ps)
    assert text.splitlines()[0] == "dim,ball,x0,x1,x2"
    back = pointset_from_csv(text)
    assert np.array_equal(back.points, ps.points)
    assert np.array_equal(back.ball_of, ps.ball_of)
    w = dissimilarities(ps).w
    assert np.array_equal(matrix_from_csv(matrix_to_csv(w)).w, w)


def test_point_csv_header_required():
    with pytest.raises(ValueError):
        pointset_from_csv("a,b\n1,2\n")
