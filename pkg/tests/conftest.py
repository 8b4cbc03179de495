import numpy as np
import pytest

from prlocal.generators import random_out_graph


def dense_pagerank(graph, alpha):
    """Independent oracle: solve pi^T = alpha/n 1^T (I - (1-alpha) P)^{-1}."""
    n = graph.n
    P = np.zeros((n, n))
    for u, v in graph.edges():
        P[u, v] += 1.0 / graph.out_degree(u)
    A = np.eye(n) - (1.0 - alpha) * P
    return np.linalg.solve(A.T, np.full(n, alpha / n))


def dense_contributions(graph, alpha, t):
    """pi(v, t) for all v via (I - (1-alpha) P) x = alpha e_t."""
    n = graph.n
    P = np.zeros((n, n))
    for u, v in graph.edges():
        P[u, v] += 1.0 / graph.out_degree(u)
    e = np.zeros(n)
    e[t] = alpha
    return np.linalg.solve(np.eye(n) - (1.0 - alpha) * P, e)


@pytest.fixture(params=range(6))
def small_graph(request):
    k = request.param
    return random_out_graph(8 + 7 * k, 1 + k % 4, seed=100 + k)


# filled by test_acceptance; echoed after the run even when output is captured
REPORT_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if REPORT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(REPORT_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
