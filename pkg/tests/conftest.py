import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from spectral_bounds.generators import random_weighted_graph
from spectral_bounds.graph_core import WeightedGraph

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def path_graph(n, w=1.0):
    return WeightedGraph.from_edges(n, [(i, i + 1, w) for i in range(n - 1)])


def complete_graph(n, w=1.0):
    return WeightedGraph.from_edges(n, [(i, j, w) for i in range(n) for j in range(i + 1, n)])


@st.composite
def graphs(draw, n_min=2, n_max=10):
    n = draw(st.integers(n_min, n_max))
    prob = draw(st.floats(0.3, 0.9))
    seed = draw(st.integers(0, 2**31 - 1))
    dist = draw(st.sampled_from(["unit", "uniform", "exponential"]))
    return random_weighted_graph(n, prob, dist, seed=seed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def P2():
    return path_graph(2)


@pytest.fixture
def P3():
    return path_graph(3)


@pytest.fixture
def K4():
    return complete_graph(4)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
