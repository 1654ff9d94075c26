import numpy as np
import pytest

from pagerank_spectral import DirectedGraph, SparseTransition, build_transition

ACCEPTANCE_LINES: list[str] = []


def cycle(n: int) -> SparseTransition:
    """Permutation P with node i linking to i+1 (mod n)."""
    return build_transition(DirectedGraph(n, [(i, (i + 1) % n) for i in range(n)]))


def identity(n: int) -> SparseTransition:
    return build_transition(DirectedGraph(n, [(i, i) for i in range(n)]))


def chain3() -> SparseTransition:
    return build_transition(DirectedGraph(3, [(0, 1), (1, 2)]))


def random_dense_stochastic(rng: np.random.Generator, n: int) -> np.ndarray:
    M = rng.exponential(size=(n, n))
    return M / M.sum(axis=0)


def random_simplex(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.exponential(size=n)
    return v / v.sum()


def linear_solve_pagerank(P_dense: np.ndarray, v: np.ndarray, alpha: float) -> np.ndarray:
    """Oracle: x = (1 - alpha)(I - alpha P)^{-1} v, normalized in the 1-norm."""
    n = P_dense.shape[0]
    x = (1 - alpha) * np.linalg.solve(np.eye(n) - alpha * P_dense, v)
    return x / x.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(20040101)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
