import numpy as np
import pytest

from medoid_lp.model import dissimilarities, line_points


@pytest.fixture
def six_line():
    """1-D points {0,1,2,10,11,12} under squared distance."""
    return dissimilarities(line_points([0, 1, 2, 10, 11, 12]), "sq").w


def random_square_instance(rng, n_max=12):
    N = int(rng.integers(3, n_max + 1))
    k = int(rng.integers(1, min(3, N - 1) + 1))
    x = rng.random((N, 2))
    return dissimilarities(x, "sq").w, k


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
