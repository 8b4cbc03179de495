import numpy as np
import pytest

from prlocal.exact import tail_pagerank
from prlocal.generators import chain3, self_loop, two_cycle
from prlocal.graph import OracleSession
from prlocal.montecarlo import McEstimates, monte_carlo, sample_extended_walk


def test_mass_is_exactly_one_increment_per_walk():
    est = monte_carlo(OracleSession(chain3(), seed=0), 0.5, 123, 2)
    assert sum(est.counts.values()) == 123
    assert est.total() == pytest.approx(0.25)


def test_self_loop_deterministic():
    est = monte_carlo(OracleSession(self_loop(), seed=0), 0.5, 50, 3)
    assert est.score(0) == pytest.approx(0.125)


def test_extended_steps_are_forced():
    # on the chain, any walk with i' >= 2 steps ends at c
    s = OracleSession(chain3(), seed=1)
    assert {sample_extended_walk(s, 0.5, 2) for _ in range(200)} == {2}


def test_query_accounting():
    s = OracleSession(two_cycle(), seed=4)
    monte_carlo(s, 0.5, 40, 1)
    c = s.query_count()
    assert c.jump == 40 and c.child == c.outdeg and c.child >= 40
    assert c.parent == 0 and c.indeg == 0


@pytest.mark.parametrize("graph", [two_cycle(), chain3()], ids=["2-cycle", "chain"])
@pytest.mark.parametrize("i_prime", [0, 1, 2])
def test_unbiased_for_tail(graph, i_prime):
    alpha, walks = 0.5, 200_000
    est = monte_carlo(OracleSession(graph, seed=i_prime), alpha, walks, i_prime)
    tail = tail_pagerank(graph, alpha, i_prime).values
    scale = (1 - alpha) ** i_prime
    q = tail / scale
    sigma = scale * np.sqrt(q * (1 - q) / walks)
    for v in range(graph.n):
        assert abs(est.score(v) - tail[v]) <= 4 * sigma[v] + 1e-15


@pytest.mark.parametrize("n_r,i_prime", [(0, 1), (5, -1)])
def test_rejects_bad_arguments(n_r, i_prime):
    with pytest.raises(ValueError):
        monte_carlo(OracleSession(two_cycle()), 0.5, n_r, i_prime)


def test_scores_dict():
    e = McEstimates({0: 3, 1: 1}, 4, 1, 0.5)
    assert e.scores == {0: 0.375, 1: 0.125}
