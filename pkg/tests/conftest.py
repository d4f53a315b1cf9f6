import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

_quiet = [HealthCheck.too_slow, HealthCheck.data_too_large]
settings.register_profile("default", max_examples=100, deadline=None, suppress_health_check=_quiet)
settings.register_profile("quick", max_examples=15, deadline=None, suppress_health_check=_quiet)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def make_tree(n, rng, wmax=9):
    from hopnav.treemetric import WeightedTree

    parent = [-1] + [int(rng.integers(0, i)) for i in range(1, n)]
    edges = [(i, parent[i], int(rng.integers(1, wmax + 1))) for i in range(1, n)]
    return WeightedTree.from_edges(n, edges), edges


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def p5():
    """Path 1-2-3-4-5 with weights 1, 2, 1, 3, rooted at 1."""
    from hopnav.treemetric import parse_tree

    return parse_tree("5 1\n1 2 1\n2 3 2\n3 4 1\n4 5 3\n")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(lines):
        terminalreporter.write_line(lines[num])
