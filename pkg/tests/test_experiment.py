import numpy as np
import pytest

from medoid_lp import experiment, report
from medoid_lp.experiment import ConfigError, ExperimentConfig, parse_config, run_experiment


def small(**kw):
    base = dict(n=(5,), k=(2,), R=(2.0, 4.0), d=(2,), case=(1, 2), trials=4, base_seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


def test_counts_add_up():
    for r in run_experiment(small(certificates=("prop1", "cor3")), workers=1):
        assert r.fractional + r.cluster_only + r.ball + r.solver_failures == r.trials
        assert r.ball <= r.cluster_only + r.ball
        assert r.ball_without_prop1 == 0
        assert set(r.cert_pass) == {"prop1", "cor3"}


def test_workers_do_not_change_results():
    cfg = small()
    a = report.to_csv(run_experiment(cfg, workers=1))
    b = report.to_csv(run_experiment(cfg, workers=2))
    assert a == b


def test_env_bounds_workers(monkeypatch):
    monkeypatch.setenv("MEDOID_LP_THREADS", "3")
    assert experiment.worker_count() == 3
    monkeypatch.setenv("MEDOID_LP_THREADS", "x")
    with pytest.raises(ConfigError):
        experiment.worker_count()


def test_cases_paired_in_two_dimensions():
    res = experiment.by_key(run_experiment(small(), workers=1))
    for R in (2.0, 4.0):
        a, b = res[(1, 2, 2, 5, R)], res[(2, 2, 2, 5, R)]
        assert (a.ball, a.fractional) == (b.ball, b.fractional)


def test_well_separated_cell_all_ball():
    cfg = ExperimentConfig(n=(20,), k=(2,), R=(5.0,), d=(2,), case=(1,), trials=100,
                           certificates=("cor3",), brute_check=False)
    (r,) = run_experiment(cfg, workers=1)
    assert r.ball == 100 and r.cert_pass["cor3"] == 100


def test_hard_corner_has_failures():
    cfg = ExperimentConfig(n=(5,), k=(3,), R=(2.0,), d=(2,), case=(1,), trials=100)
    (r,) = run_experiment(cfg, workers=1)
    assert r.failed_ball > 0


def test_brute_cross_check():
    cfg = ExperimentConfig(n=(4,), k=(2,), R=(2.5,), d=(2,), case=(1,), trials=10, brute_check=True)
    (r,) = run_experiment(cfg, workers=1)
    assert r.brute_mismatches == 0


def test_guard_and_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(n=(50,), k=(2,)).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(trials=0).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(R=(0.0,)).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(certificates=("cor9",)).validate()
    # the published grid has n*k up to 90 and passes the guard
    ExperimentConfig.full().validate()
    assert len(ExperimentConfig.full().cells()) == 6 * 2 * 16 * 4 * 2


def test_parse_config():
    cfg = parse_config("# grid\nn = 5\nn = 10\nR = 2.0, 3.5\ntrials=7\nseed = 4\n"
                       "certificates = prop1, cor4\nbrute_check = yes\n")
    assert cfg.n == (5, 10) and cfg.R == (2.0, 3.5)
    assert cfg.trials == 7 and cfg.base_seed == 4 and cfg.brute_check
    assert cfg.certificates == ("prop1", "cor4")
    with pytest.raises(ConfigError):
        parse_config("colour = blue\n")
    with pytest.raises(ConfigError):
        parse_config("n five\n")


def test_report_formats(tmp_path):
    res = run_experiment(small(R=(3.0,), case=(1,), certificates=("prop1",)), workers=1)
    text = report.to_csv(res)
    lines = text.splitlines()
    assert len(lines) == 2 and lines[0].split(",")[-1] == "prop1_pass"
    paths = report.emit_report(res, str(tmp_path / "o"))
    assert [p.rsplit("/", 1)[1] for p in paths] == ["results.csv", "results.json",
                                                    "failed_ball_case1_d2_k2.svg"]
    with pytest.raises(report.ReportError):
        report.emit_report([], str(tmp_path / "empty"))
    assert not (tmp_path / "empty").exists()


def test_svg_panels_and_determinism():
    cfg = small(n=(4, 6), R=(2.0, 3.0, 4.0), d=(2, 3), k=(2, 3), case=(1, 2), trials=2)
    res = run_experiment(cfg, workers=1)
    assert len(report.panels(res)) == 8
    svg = report.svg_panel(res, 1, 2, 3)
    assert svg.startswith("<svg") and svg.count("<polyline") == 2
    again = run_experiment(cfg, workers=1)
    assert report.svg_panel(again, 1, 2, 3) == svg
    assert report.to_json(again) == report.to_json(res)
