import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from medoid_lp.certificates import (check_all, check_democratic_certificate,
                                    check_dual_certificate, check_max_u_certificate,
                                    check_threshold_certificate, democratic_objective,
                                    prop1_conditions, _Setup)
from medoid_lp.kmedoids import Clustering, ClusteringError, brute_force_kmedoids, solve_relaxation
from medoid_lp.model import RadialLaw, dissimilarities, separated_balls

from conftest import random_square_instance


def test_true_clustering_certified(six_line):
    c = Clustering.from_medoids(six_line, [1, 4])
    rep = check_dual_certificate(six_line, c)
    assert rep.holds and rep.margin > 0
    assert prop1_conditions(six_line, c, rep.witness["u"], rep.witness["lambda"]) > 0
    rr = solve_relaxation(six_line, 2)
    assert rr.integral and rr.clustering.medoids.tolist() == [1, 4]


def test_wrong_clustering_rejected(six_line):
    # right partition, wrong medoids (0 and 10 instead of 1 and 11)
    c = Clustering.from_medoids(six_line, [0, 3])
    assert not check_dual_certificate(six_line, c).holds
    for kind in ("cor2", "cor4"):
        assert not check_all(six_line, c, (kind,))[kind].holds
    # the thresholding test only looks at the partition, so it passes here;
    # it certifies nothing unless the clustering is the unique optimum
    assert check_threshold_certificate(six_line, c).holds


def test_two_points_two_clusters():
    w = np.array([[0.0, 4.0], [4.0, 0.0]])
    c = Clustering.from_medoids(w, [0, 1])
    rep = check_dual_certificate(w, c)
    assert rep.holds
    assert rep.witness["u"] == pytest.approx(0.0)
    np.testing.assert_allclose(rep.witness["lambda"], 0.0)


def tight_pair():
    rng = np.random.default_rng(0)
    a = rng.random((5, 2)) * 0.2
    b = a + np.array([6.0, 0.0])
    w = dissimilarities(np.vstack([a, b]), "sq").w
    return w, Clustering.from_labels(w, [0] * 5 + [1] * 5)


def test_democratic_on_separated_tight_clusters():
    w, c = tight_pair()
    same = c.assign[:, None] == c.assign[None, :]
    assert w[same].max() <= 0.1 and w[~same].min() >= 25
    rep = check_democratic_certificate(w, c)
    assert rep.holds and 0 < rep.witness["u"] < rep.diagnostics["u_max"]


def test_democratic_single_cluster_has_no_upper_limit(six_line):
    c = Clustering.from_medoids(six_line, [2])
    rep = check_democratic_certificate(six_line, c)
    assert math.isinf(rep.diagnostics["u_max"])
    assert rep.holds == check_dual_certificate(six_line, c).holds


def test_threshold_reports_violating_pair():
    w, c = tight_pair()
    assert check_threshold_certificate(w, c).holds
    # move one point across: an inter-cluster pair becomes closer than an intra pair
    w2 = dissimilarities(np.array([[0.0], [1.0], [1.6], [3.0]]), "sq").w
    c2 = Clustering.from_medoids(w2, [0, 3])
    rep = check_threshold_certificate(w2, c2)
    assert not rep.holds and rep.margin < 0
    i, j = rep.diagnostics["across_pair"]
    assert c2.assign[i] != c2.assign[j]


def test_threshold_large_separation_power_metric():
    # separation past 2(1 + (1 + nmax/nmin)^(1/p)) for p = 2 and equal sizes
    R = 2 * (1 + 2 ** 0.5) + 0.05
    for seed in range(5):
        ps = separated_balls(8, 2, 2, R, RadialLaw.UNIFORM, seed)
        w = dissimilarities(ps, "sq").w
        assert check_threshold_certificate(w, Clustering.from_labels(w, ps.ball_of)).holds


def test_max_u_rejects_single_cluster(six_line):
    with pytest.raises(ClusteringError):
        check_max_u_certificate(six_line, Clustering.from_medoids(six_line, [2]))


def test_max_u_majority_at_38():
    held = 0
    for seed in range(10):
        ps = separated_balls(30, 2, 2, 3.8, RadialLaw.QUADRATIC, seed)
        w = dissimilarities(ps, "sq").w
        held += check_max_u_certificate(w, Clustering.from_labels(w, ps.ball_of)).holds
    assert held > 5


def test_beyond_thresholding_witness_exists():
    found = False
    for seed in range(40):
        ps = separated_balls(30, 2, 2, 3.9, RadialLaw.QUADRATIC, seed)
        w = dissimilarities(ps, "sq").w
        c = Clustering.from_labels(w, ps.ball_of)
        if check_max_u_certificate(w, c).holds and not check_threshold_certificate(w, c).holds:
            found = True
            break
    assert found


def test_positive_parts_match_direct_recomputation():
    w, k = random_square_instance(np.random.default_rng(3))
    c = Clustering.from_medoids(w, brute_force_kmedoids(w, k).optimal_medoid_sets[0])
    s = _Setup(w, c)
    us = np.linspace(0.0, 3.0, 17)
    got = democratic_objective(s, us)
    for u, g in zip(us, got):
        cols = [sum(max(u / s.sizes[i] + w[i, c.assign[i]] - w[i, j], 0.0) for i in range(s.N))
                for j in s.nonmedoids]
        assert g == pytest.approx((max(cols) if cols else 0.0) - u, abs=1e-12)


@given(seed=st.integers(0, 10**6), scale=st.floats(0.01, 100.0))
@settings(max_examples=25, deadline=None)
def test_scale_covariance(seed, scale):
    w, k = random_square_instance(np.random.default_rng(seed), n_max=8)
    c = Clustering.from_medoids(w, brute_force_kmedoids(w, k).optimal_medoid_sets[0])
    kinds = ("cor2", "cor3", "cor4") if k > 1 else ("cor2", "cor3")
    a, b = check_all(w, c, kinds), check_all(w * scale, c, kinds)
    for kind in kinds:
        assert a[kind].holds == b[kind].holds
        if math.isfinite(a[kind].margin):
            assert b[kind].margin == pytest.approx(scale * a[kind].margin, rel=1e-9, abs=1e-9)
        if a[kind].witness and kind == "cor4":
            assert b[kind].witness["u"] == pytest.approx(scale * a[kind].witness["u"], rel=1e-9)
    pa, pb = check_dual_certificate(w, c), check_dual_certificate(w * scale, c)
    assert pa.holds == pb.holds
    assert pb.margin == pytest.approx(scale * pa.margin, rel=1e-6, abs=1e-8)


@given(seed=st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_implication_chain(seed):
    w, k = random_square_instance(np.random.default_rng(seed), n_max=10)
    ex = brute_force_kmedoids(w, k)
    c = Clustering.from_medoids(w, ex.optimal_medoid_sets[0])
    reps = check_all(w, c)
    # the thresholding result presumes a unique optimum
    if reps["cor3"].holds and ex.unique:
        assert reps["cor2"].holds
    if reps["cor2"].holds or ("cor4" in reps and reps["cor4"].holds):
        assert reps["prop1"].holds


def test_threshold_without_uniqueness_does_not_certify():
    # a two-point cluster makes either point an optimal medoid
    w = np.array([[0.0, 0.11, 0.3, 0.5], [0.11, 0.0, 0.26, 0.6],
                  [0.3, 0.26, 0.0, 0.7], [0.5, 0.6, 0.7, 0.0]])
    ex = brute_force_kmedoids(w, 3)
    assert not ex.unique
    c = Clustering.from_medoids(w, ex.optimal_medoid_sets[0])
    assert not check_dual_certificate(w, c).holds


def test_report_json_encodes_infinity():
    w = np.array([[0.0]])
    # a single point has an unconstrained margin
    rep = check_dual_certificate(w, Clustering(np.array([0]), np.array([0])))
    d = rep.to_dict()
    assert rep.holds and d["margin"] == "inf"
