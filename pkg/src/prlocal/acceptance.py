"""Acceptance checks, one function per criterion.

Each ``criterion_k`` runs its experiment with fixed seeds and returns a
:class:`CriterionResult`.  A criterion passes only if its numeric condition
holds *and* it finished inside its time limit.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .baselines import chernoff_walks, plain_mc
from .exact import exact_pagerank, tail_pagerank
from .generators import chain3, random_out_graph, random_regular, two_cycle
from .graph import DirectedGraph, OracleSession
from .hard_instances import build_hard_family, verify_family
from .montecarlo import monte_carlo
from .push import approx_contributions, push_without_threshold, y_value
from .rounding_push import (adaptive_estimate, compute_params, event_E_check,
                            rounding_op, rounding_push_run)

ALPHAS = (0.2, 0.5, 0.8)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed_s: float
    limit_s: float

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"criterion {self.number:2d} {verdict}  {self.name}: {self.detail} "
                f"[{self.elapsed_s:.1f}s / limit {self.limit_s:.0f}s]")


def _finish(number: int, name: str, ok: bool, detail: str, start: float,
            limit: float) -> CriterionResult:
    elapsed = time.perf_counter() - start
    return CriterionResult(number, name, ok and elapsed < limit, detail, elapsed, limit)


def small_corpus(count: int = 50, seed: int = 0) -> list[tuple[DirectedGraph, float, int]]:
    """``(graph, alpha, target)`` triples: n in [2, 100], out-degrees 1..4."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.integers(2, 101))
        g = random_out_graph(n, 4, seed=seed * 1000 + k)
        out.append((g, ALPHAS[k % 3], int(rng.integers(n))))
    return out


def criterion_1(r_max: float = 1e-4) -> CriterionResult:
    start = time.perf_counter()
    worst = 0.0
    pushes = 0
    for g, alpha, t in small_corpus():
        pi = exact_pagerank(g, alpha).values
        n = g.n

        def check(state, v):
            nonlocal worst, pushes
            pushes += 1
            rhs = sum(state.reserve.values()) / n + sum(pi[u] * r for u, r in state.residue.items())
            worst = max(worst, abs(pi[t] - rhs))

        approx_contributions(OracleSession(g), t, r_max, alpha, on_push=check)
    ok = worst <= 1e-9 and pushes > 0
    return _finish(1, "pushback invariant", ok,
                   f"max deviation {worst:.2e} over {pushes} pushbacks (tol 1e-9)", start, 10)


def criterion_2(levels: int = 15) -> CriterionResult:
    start = time.perf_counter()
    worst = -math.inf
    checked = 0
    for g, alpha, t in small_corpus():

        def check(event, i, v, state, r):
            nonlocal worst, checked
            checked += 1
            worst = max(worst, r - (1.0 - alpha) ** i)

        state = push_without_threshold(OracleSession(g), t, levels + 1, alpha, observer=check)
        # residues left at the last level are bounded too
        for r in state.residues[levels + 1].values():
            worst = max(worst, r - (1.0 - alpha) ** (levels + 1))
    ok = worst <= 1e-12
    return _finish(2, "residue decay", ok,
                   f"max r_i(v) - (1-a)^i = {worst:.2e} over {checked} residues (slack 1e-12)",
                   start, 10)


def criterion_3(seeds: int = 20, r_max: float = 2e-3) -> CriterionResult:
    start = time.perf_counter()
    worst = 0.0
    pushes = 0
    for s in range(seeds):
        rng = np.random.default_rng(10_000 + s)
        n = int(rng.integers(20, 101))
        g = random_out_graph(n, 3, seed=10_000 + s)
        alpha = ALPHAS[s % 3]
        t = int(rng.integers(n))
        pi = exact_pagerank(g, alpha)
        params = compute_params(n, g.m, g.delta_in, g.delta_out, alpha).with_r_max(r_max)
        # before any event Y is just pi(t) times the unit residue at t
        last = {"y": pi[t]}

        def watch(event, i, v, state, *payload):
            nonlocal worst, pushes
            y = y_value(state, pi, n)
            if event == "push" and i <= state.L - 2:
                pushes += 1
                worst = max(worst, abs(y - last["y"]))
            last["y"] = y

        rounding_push_run(OracleSession(g, seed=s), t, params, observer=watch)
    ok = worst <= 1e-9 and pushes > 0
    return _finish(3, "Y invariance", ok,
                   f"max |dY| {worst:.2e} over {pushes} pushbacks at levels <= L-2", start, 30)


def criterion_4(runs: int = 10_000, n_r: int = 100, alpha: float = 0.5) -> CriterionResult:
    start = time.perf_counter()
    worst_z = 0.0
    for name, g in (("2-cycle", two_cycle()), ("chain", chain3())):
        for i_prime in (0, 1, 2):
            tails = tail_pagerank(g, alpha, i_prime).values
            totals = np.zeros(g.n)
            seq = np.random.SeedSequence([4, g.n, i_prime])
            for child in seq.spawn(runs):
                est = monte_carlo(OracleSession(g, seed=int(child.generate_state(1)[0])),
                                  alpha, n_r, i_prime)
                for v, c in est.counts.items():
                    totals[v] += c
            scale = (1.0 - alpha) ** i_prime
            walks = runs * n_r
            means = totals * scale / walks
            q = tails / scale
            sigma = scale * np.sqrt(q * (1.0 - q) / walks)
            for v in range(g.n):
                dev = abs(means[v] - tails[v])
                if sigma[v] == 0:
                    z = 0.0 if dev < 1e-15 else math.inf
                else:
                    z = dev / sigma[v]
                worst_z = max(worst_z, z)
    return _finish(4, "Monte Carlo unbiasedness", worst_z <= 4.0,
                   f"max |mean - tail| = {worst_z:.2f} sigma (band 4 sigma)", start, 60)


def criterion_5(draws: int = 100_000, r_max: float = 1.0, seed: int = 0) -> CriterionResult:
    import random
    start = time.perf_counter()
    rng = random.Random(seed)
    parts = []
    ok = True
    for frac in (0.1, 0.5, 0.9):
        r_hat = frac * r_max
        mean = sum(rounding_op(r_hat, r_max, rng) for _ in range(draws)) / draws
        rel = abs(mean - r_hat) / r_hat
        ok &= rel <= 0.01
        parts.append(f"{frac}: {rel:.2%}")
    return _finish(5, "rounding martingale", ok, "relative error " + ", ".join(parts)
                   + " (tol 1%)", start, 5)


def criterion6_targets(seed: int = 7) -> list[tuple[str, DirectedGraph, int]]:
    fam = build_hard_family(4096, 8192, 4, 4, 0.5, 2, seed=seed)
    return [
        ("2-cycle", two_cycle(), 0),
        ("regular n=1024", random_regular(1024, 2, seed=11), 0),
        ("H_p n=4096", fam.graphs[-1], fam.t),
    ]


def criterion_6(runs: int = 200, alpha: float = 0.5) -> CriterionResult:
    start = time.perf_counter()
    parts = []
    ok = True
    for name, g, t in criterion6_targets():
        pi = exact_pagerank(g, alpha)[t]
        fails = 0
        for s in range(runs):
            rep = adaptive_estimate(OracleSession(g, seed=s), t, g.n, g.m, g.delta_in,
                                    g.delta_out, alpha)
            fails += abs(rep.estimate - pi) >= pi / 2
        frac = fails / runs
        ok &= frac <= 0.15
        parts.append(f"{name} {frac:.3f}")
    return _finish(6, "end-to-end error", ok, "failure fraction " + ", ".join(parts)
                   + " (max 0.15)", start, 600)


def loglog_slope(sizes, values) -> float:
    return float(np.polyfit(np.log(sizes), np.log(values), 1)[0])


def criterion_7(trials: int = 10, alpha: float = 0.5, d: int = 2) -> CriterionResult:
    start = time.perf_counter()
    sizes = [2 ** 10, 2 ** 12, 2 ** 14]
    adaptive_q, mc_q = [], []
    for n in sizes:
        g = random_regular(n, d, seed=n)
        a, b = [], []
        for s in range(trials):
            t = (s * 7919) % n
            a.append(adaptive_estimate(OracleSession(g, seed=s), t, n, g.m, d, d, alpha)
                     .queries.total)
            b.append(plain_mc(OracleSession(g, seed=s), t, alpha, chernoff_walks(n, alpha))
                     .queries.total)
        adaptive_q.append(np.mean(a))
        mc_q.append(np.mean(b))
    sa, sm = loglog_slope(sizes, adaptive_q), loglog_slope(sizes, mc_q)
    return _finish(7, "scaling trend", sa <= 0.2 and sm >= 0.8,
                   f"adaptive slope {sa:.3f} (max 0.2), plain_mc slope {sm:.3f} (min 0.8)",
                   start, 1200)


# frozen from an independent 50-digit evaluation (see tests/test_rounding_push.py)
PARAMS_1024 = {"i_prime": 10, "epsilon": Fraction(165, 1024), "n_r": 206, "L": 21}


def criterion_8() -> CriterionResult:
    start = time.perf_counter()
    p = compute_params(1024, 2048, 2, 2, 0.5)
    got = {"i_prime": p.i_prime, "epsilon": Fraction(p.epsilon), "n_r": p.n_r, "L": p.L}
    ok = got == PARAMS_1024
    detail = ", ".join(f"{k}={got[k]}" for k in got)
    return _finish(8, "parameter block", ok, detail, start, 1)


def criterion_9(seed: int = 7) -> CriterionResult:
    start = time.perf_counter()
    fam = build_hard_family(4096, 8192, 4, 4, 0.5, 2, seed=seed)
    rep = verify_family(fam, c=0.05)
    detail = (f"ratios {', '.join(f'{r:.4f}' for r in rep.ratios)} (min 1.05), "
              f"structural problems: {len(rep.structural_problems)}")
    return _finish(9, "hard-family separation", rep.passed, detail, start, 60)


def criterion_10(runs: int = 100, alpha: float = 0.5) -> CriterionResult:
    start = time.perf_counter()
    g = random_regular(1024, 2, seed=11)
    params = compute_params(g.n, g.m, g.delta_in, g.delta_out, alpha)
    tails = tail_pagerank(g, alpha, params.i_prime)
    good = 0
    for s in range(runs):
        est = monte_carlo(OracleSession(g, seed=s), alpha, params.n_r, params.i_prime)
        good += event_E_check(est, tails, params.epsilon)[0]
    return _finish(10, "event E frequency", good >= 85,
                   f"E held in {good}/{runs} runs (min 85)", start, 300)


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}


def run_all(selected=None, echo: Callable[[str], None] = print) -> list[CriterionResult]:
    results = []
    for k in sorted(selected or CRITERIA):
        res = CRITERIA[k]()
        echo(res.line())
        results.append(res)
    return results
