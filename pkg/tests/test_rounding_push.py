import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from prlocal.exact import exact_pagerank, tail_pagerank
from prlocal.generators import chain3, random_out_graph, random_regular, two_cycle
from prlocal.graph import OracleSession
from prlocal.montecarlo import McEstimates
from prlocal.push import y_value
from prlocal.rounding_push import (AlgoParams, adaptive_estimate, assemble_estimate,
                                   compute_params, event_E_check, gamma, ideal_r_max,
                                   partition, query_budget, rounding_op, rounding_push_run)


def reference_params(n, m, din, dout, alpha):
    """Same formulas, evaluated with 50 significant digits."""
    mpmath.mp.dps = 50
    n_, a = mpmath.mpf(n), mpmath.mpf(alpha)
    lo = min(din, dout)
    M = mpmath.mpf(lo) if lo <= mpmath.sqrt(n_) else min(mpmath.mpf(lo), mpmath.sqrt(m))
    growth = (1 - a) * din
    if growth > 1:
        i_star = mpmath.log(n_ / M) / mpmath.log(growth * din)
    else:
        i_star = mpmath.log(1 / n_) / mpmath.log(1 - a)
    ip = int(mpmath.floor(i_star + mpmath.mpf(10) ** -30))
    eps = 30 * a / n_ * (ip + 1) * max(growth ** i_star, 1)
    n_r = int(mpmath.ceil(3200 * (1 - a) ** ip * mpmath.log(40 * n_) / eps - mpmath.mpf(10) ** -30))
    L = int(mpmath.ceil(mpmath.log(a / (400 * n_)) / mpmath.log(1 - a))) + 1
    return i_star, ip, eps, n_r, L


def test_parameter_block_n1024():
    p = compute_params(1024, 2048, 2, 2, 0.5)
    i_star, ip, eps, n_r, L = reference_params(1024, 2048, 2, 2, 0.5)
    assert (p.i_prime, p.n_r, p.L) == (ip, n_r, L) == (10, 206, 21)
    assert Fraction(p.epsilon) == Fraction(165, 1024)
    assert mpmath.almosteq(eps, mpmath.mpf(165) / 1024, 1e-40)
    assert p.gamma == 0.5


def test_parameter_block_growth_regime():
    p = compute_params(1024, 4096, 4, 4, 0.5)
    i_star, ip, eps, n_r, L = reference_params(1024, 4096, 4, 4, 0.5)
    assert p.i_star == pytest.approx(8 / 3) and float(i_star) == pytest.approx(8 / 3)
    assert (p.i_prime, p.n_r, p.L) == (ip, n_r, L)
    assert p.i_prime == 2
    assert p.epsilon == pytest.approx(float(eps), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(k=st.integers(4, 20), din=st.integers(1, 16), dout=st.integers(1, 16),
       alpha=st.sampled_from([0.1, 0.2, 0.3, 0.5, 0.7, 0.9]))
def test_parameter_block_against_reference(k, din, dout, alpha):
    n = 2 ** k
    p = compute_params(n, 4 * n, din, dout, alpha)
    _, ip, eps, n_r, L = reference_params(n, 4 * n, din, dout, alpha)
    assert (p.i_prime, p.n_r, p.L) == (ip, n_r, L)
    assert p.epsilon == pytest.approx(float(eps), rel=1e-9)


@pytest.mark.parametrize("alpha,din,expected", [
    (0.5, 2, 0.5),
    (0.5, 1, 0.5),
    (0.5, 4, 1 / 6),
    (0.2, 8, math.log(1.25) / (4 * math.log(8) - 2 * math.log(1.25))),
])
def test_gamma(alpha, din, expected):
    assert gamma(alpha, din) == pytest.approx(expected)


@pytest.mark.parametrize("args", [(1, 1, 1, 1, 0.5), (10, 5, 1, 1, 0.5), (10, 20, 11, 1, 0.5),
                                  (10, 20, 2, 2, 1.0)])
def test_params_validation(args):
    with pytest.raises(ValueError):
        compute_params(*args)


def test_budget_formula():
    # gamma = 1/2 at d = 2, alpha = 1/2: budget = C sqrt(2) log2(n)
    assert query_budget(1024, 2048, 2, 2, 0.5, 64, 1) == pytest.approx(64 * math.sqrt(2) * 10)


@pytest.mark.parametrize("frac", [0.1, 0.5, 0.9])
def test_rounding_martingale(frac):
    rng = random.Random(1234)
    draws = 200_000
    mean = sum(rounding_op(frac, 1.0, rng) for _ in range(draws)) / draws
    sigma = math.sqrt(frac * (1 - frac) / draws)
    assert abs(mean - frac) <= 4 * sigma


@pytest.mark.parametrize("r", [0.0, 1.0, 1.5, -0.1])
def test_rounding_domain(r):
    with pytest.raises(ValueError):
        rounding_op(r, 1.0, random.Random(0))


def test_rounding_values():
    rng = random.Random(0)
    assert {rounding_op(0.3, 0.8, rng) for _ in range(100)} == {0.0, 0.8}


def test_partition_threshold():
    est = McEstimates({0: 10, 1: 9}, 100, 0, 0.5)
    assert partition(est, 0.1).v_ge_eps == frozenset({0})
    assert partition(est, 0.1).is_low(1)


def test_y_invariant_across_level_pushes():
    g = random_out_graph(40, 3, seed=8)
    alpha = 0.5
    pi = exact_pagerank(g, alpha)
    params = compute_params(g.n, g.m, g.delta_in, g.delta_out, alpha).with_r_max(1e-3)
    last = [pi[5]]
    checked = []

    def obs(event, i, v, s, *payload):
        y = y_value(s, pi, g.n)
        if event == "push" and i <= s.L - 2:
            checked.append(abs(y - last[0]))
        last[0] = y

    rounding_push_run(OracleSession(g, seed=3), 5, params, observer=obs)
    assert checked and max(checked) <= 1e-9


def test_run_needs_r_max():
    p = compute_params(2, 2, 1, 1, 0.5)
    with pytest.raises(ValueError):
        rounding_push_run(OracleSession(two_cycle()), 0, p)


def test_marked_nodes_never_pushed():
    g = two_cycle()
    p = compute_params(2, 2, 1, 1, 0.5).with_r_max(0.01)
    pushed = []
    rep = rounding_push_run(OracleSession(g, seed=0), 0, p,
                            observer=lambda e, i, v, s, *a: pushed.append(v) if e == "push" else None)
    assert not set(pushed) & rep.partition.v_ge_eps


def test_assemble_uses_levels_below_L():
    from prlocal.push import PushState
    s = PushState.initial(0, 0.5, 2)
    s.reserves[0][0] = 0.5
    s.residues[1][1] = 0.5
    s.residues[2][1] = 99.0  # level L is excluded
    est = McEstimates({1: 4}, 4, 0, 0.5)
    assert assemble_estimate(s, est, 2) == pytest.approx(0.25 + 0.5)


def test_estimate_is_unbiased_given_screening():
    # with the screening fixed, rounding keeps the estimate's mean
    g = chain3()
    p = compute_params(3, 3, 2, 1, 0.5).with_r_max(0.05)
    vals = [rounding_push_run(OracleSession(g, seed=s), 2, p).estimate for s in range(300)]
    pi = exact_pagerank(g, 0.5)[2]
    assert sum(vals) / len(vals) == pytest.approx(pi, rel=0.05)


@pytest.mark.parametrize("graph,t", [(two_cycle(), 0), (random_regular(1024, 2, seed=11), 0)],
                         ids=["2-cycle", "regular-1024"])
def test_adaptive_accuracy(graph, t):
    pi = exact_pagerank(graph, 0.5)[t]
    fails = 0
    for s in range(30):
        rep = adaptive_estimate(OracleSession(graph, seed=s), t, graph.n, graph.m,
                                graph.delta_in, graph.delta_out, 0.5)
        fails += abs(rep.estimate - pi) >= pi / 2
        assert rep.r_max_schedule[0] == 0.5
    assert fails <= 3


def test_adaptive_report_json():
    g = random_regular(64, 2, seed=0)
    rep = adaptive_estimate(OracleSession(g, seed=1), 0, g.n, g.m, 2, 2, 0.5)
    js = rep.to_json()
    assert set(js) == {"estimate", "queries", "params", "seed", "elapsed_ms", "r_max_schedule",
                       "budget", "budget_truncated"}
    assert js["params"]["r_max"] in js["r_max_schedule"]
    assert js["queries"]["total"] == rep.queries.total


def test_adaptive_truncates_on_tiny_budget():
    g = random_regular(256, 2, seed=0)
    rep = adaptive_estimate(OracleSession(g, seed=1), 0, g.n, g.m, 2, 2, 0.5, budget_const=1e-6)
    assert rep.budget_truncated and rep.r_max_schedule == [0.5]


def test_ideal_r_max():
    p = compute_params(1024, 2048, 2, 2, 0.5)
    assert ideal_r_max(1 / 1024, p) == pytest.approx(1 / (1024 * 5000 * 21 * 165 / 1024))


def test_event_e_conditions():
    g = chain3()
    tails = tail_pagerank(g, 0.5, 0)  # = pagerank: 1/6, 1/4, 7/12
    est = McEstimates({0: 17, 1: 25, 2: 58}, 100, 0, 0.5)
    ok, bad = event_E_check(est, tails, 0.2)
    assert ok and bad == []
    # node 2 estimated too high; node 1 unmarked although its tail exceeds 2 eps
    est = McEstimates({0: 10, 1: 5, 2: 85}, 100, 0, 0.5)
    ok, bad = event_E_check(est, tails, 0.1)
    assert not ok
    assert (2, "relative-error") in bad and (1, "low-upper-bound") in bad


def test_event_e_high_lower_bound():
    tails = tail_pagerank(chain3(), 0.5, 0)
    est = McEstimates({0: 100}, 100, 0, 0.5)
    ok, bad = event_E_check(est, tails, 0.3)
    assert (0, "high-lower-bound") in bad


def test_event_e_kind_mismatch():
    with pytest.raises(ValueError):
        event_E_check(McEstimates({}, 1, 1, 0.5), tail_pagerank(chain3(), 0.5, 0), 0.1)
