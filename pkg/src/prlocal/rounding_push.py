"""RoundingPush: Monte Carlo screening followed by a randomized leveled push.

Phase one runs extended walks and marks the nodes whose estimated tail
PageRank is at least ``epsilon``.  Phase two pushes backwards from the
target level by level, but only through the unmarked nodes; a residue below
``r_max`` is first rounded to ``r_max`` or ``0`` so that it keeps its mean.
The estimate combines the settled reserves with the Monte Carlo scores of
whatever residue is left on marked nodes.

``r_max`` depends on the unknown ``pi(t)``; :func:`adaptive_estimate` halves
it from 1/2 until a query budget runs out.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from .exact import ScoreVector
from .graph import OracleSession, QueryCounts
from .montecarlo import McEstimates, monte_carlo
from .push import Observer, PushState, pushback_level

MC_CONST = 3200.0
EPS_CONST = 30.0
DEFAULT_BUDGET_CONST = 64.0
DEFAULT_POLYLOG_POWER = 1.0


@dataclass(frozen=True)
class AlgoParams:
    alpha: float
    gamma: float
    i_star: float
    i_prime: int
    epsilon: float
    n_r: int
    L: int
    r_max: Optional[float] = None

    def with_r_max(self, r_max: float) -> AlgoParams:
        return replace(self, r_max=r_max)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Partition:
    """Nodes whose Monte Carlo score reached ``epsilon``; the rest is ``V_<eps``."""

    v_ge_eps: frozenset[int]
    epsilon: float

    def is_low(self, v: int) -> bool:
        return v not in self.v_ge_eps


@dataclass
class EstimateReport:
    estimate: float
    queries: QueryCounts
    params: AlgoParams
    seed: Optional[int]
    elapsed_ms: float
    r_max_schedule: list[float] = field(default_factory=list)
    budget: Optional[float] = None
    budget_truncated: bool = False
    # run internals, kept for verification but never serialized
    state: Optional[PushState] = field(default=None, repr=False, compare=False)
    mc: Optional[McEstimates] = field(default=None, repr=False, compare=False)
    partition: Optional[Partition] = field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        p = self.params
        return {
            "estimate": self.estimate,
            "queries": self.queries.as_dict(),
            "params": {k: getattr(p, k) for k in
                       ("alpha", "gamma", "i_star", "i_prime", "epsilon", "n_r", "L", "r_max")},
            "seed": self.seed,
            "elapsed_ms": self.elapsed_ms,
            "r_max_schedule": list(self.r_max_schedule),
            "budget": self.budget,
            "budget_truncated": self.budget_truncated,
        }


def _snap(x: float, tol: float = 1e-9) -> float:
    # logs of exact powers come back as 9.999999999999998 and the like
    r = round(x)
    return float(r) if abs(x - r) <= tol * max(1.0, abs(x)) else x


def gamma(alpha: float, delta_in: float) -> float:
    """Improvement exponent: 1/2 when ``delta_in <= 1/(1-alpha)``, else
    ``log(1/(1-a)) / (4 log delta_in - 2 log(1/(1-a)))``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if delta_in < 1:
        raise ValueError(f"delta_in must be >= 1, got {delta_in}")
    if delta_in <= 1.0 / (1.0 - alpha):
        return 0.5
    a = math.log(1.0 / (1.0 - alpha))
    return a / (4.0 * math.log(delta_in) - 2.0 * a)


def compute_params(n: int, m: int, delta_in: int, delta_out: int, alpha: float,
                   mc_const: float = MC_CONST, eps_const: float = EPS_CONST) -> AlgoParams:
    """Walk length, screening threshold, walk count and level count.

    ``m`` only matters when both degree caps exceed ``sqrt(n)``; otherwise
    ``min(delta_in, delta_out) <= sqrt(m)`` already holds because ``m >= n``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if m < n:
        raise ValueError(f"m must be >= n (every node has an out-edge), got m={m}, n={n}")
    for name, d in (("delta_in", delta_in), ("delta_out", delta_out)):
        if not 1 <= d <= n:
            raise ValueError(f"{name} must lie in [1, n], got {d}")

    g = gamma(alpha, delta_in)
    lo = min(delta_in, delta_out)
    M = lo if lo <= math.sqrt(n) else min(lo, math.sqrt(m))
    growth = (1.0 - alpha) * delta_in
    if growth > 1.0:
        i_star = math.log(n / M) / math.log(growth * delta_in)
    else:
        i_star = math.log(1.0 / n) / math.log(1.0 - alpha)
    i_star = _snap(i_star)
    i_prime = math.floor(i_star)
    epsilon = eps_const * alpha / n * (i_prime + 1) * max(growth ** i_star, 1.0)
    n_r = math.ceil(_snap(mc_const * (1.0 - alpha) ** i_prime * math.log(40 * n) / epsilon))
    L = math.ceil(_snap(math.log(alpha / (400 * n)) / math.log(1.0 - alpha))) + 1
    return AlgoParams(alpha=alpha, gamma=g, i_star=i_star, i_prime=i_prime,
                      epsilon=epsilon, n_r=n_r, L=L)


def ideal_r_max(pi_t: float, params: AlgoParams) -> float:
    """The analysis value ``pi(t) / (5000 L epsilon)``; needs the true ``pi(t)``."""
    return pi_t / (5000.0 * params.L * params.epsilon)


def query_budget(n: int, m: int, delta_in: int, delta_out: int, alpha: float,
                 budget_const: float = DEFAULT_BUDGET_CONST,
                 polylog_power: float = DEFAULT_POLYLOG_POWER) -> float:
    """``budget_const * sqrt(n) * min(din^.5/n^g, dout^.5/n^g, m^.25) * log2(n)^polylog_power``."""
    if not budget_const > 0:
        raise ValueError(f"budget_const must be positive, got {budget_const}")
    g = gamma(alpha, delta_in)
    ng = n ** g
    core = math.sqrt(n) * min(math.sqrt(delta_in) / ng, math.sqrt(delta_out) / ng, m ** 0.25)
    return budget_const * core * math.log2(n) ** polylog_power


def partition(estimates: McEstimates, epsilon: float) -> Partition:
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    unit = estimates.unit
    high = frozenset(v for v, c in estimates.counts.items() if c * unit >= epsilon)
    return Partition(high, epsilon)


def rounding_op(r_hat: float, r_max: float, rng) -> float:
    """``r_max`` with probability ``r_hat / r_max``, else ``0.0``."""
    if not 0.0 < r_hat < r_max:
        raise ValueError(f"rounding needs 0 < r_hat < r_max, got r_hat={r_hat}, r_max={r_max}")
    return r_max if rng.random() < r_hat / r_max else 0.0


@dataclass
class _PushRun:
    state: PushState
    rounds: int
    pushes: int
    completed: bool


def _push_phase(session: OracleSession, t: int, alpha: float, L: int, r_max: float,
                part: Partition, query_cap: Optional[int] = None,
                observer: Optional[Observer] = None) -> _PushRun:
    """Levels ``0..L-1`` of round-then-push over ``V_<eps``.

    Stops early (``completed=False``) once the session's total query count
    passes ``query_cap``.  Observer events: ``("round", i, v, state, before,
    after)`` and ``("push", i, v, state, r_pushed)``.
    """
    state = PushState.initial(t, alpha, L)
    rng = session.rng
    high = part.v_ge_eps
    rounds = pushes = 0
    for i in range(L):
        res = state.residues[i]
        for v in sorted(res):
            if v in high:
                continue
            r = res[v]
            if r < r_max:
                new = rounding_op(r, r_max, rng)
                rounds += 1
                if new == 0.0:
                    del res[v]
                else:
                    res[v] = new
                if observer is not None:
                    observer("round", i, v, state, r, new)
                if new == 0.0:
                    continue
            pushed = pushback_level(state, i, v, session)
            pushes += 1
            if observer is not None:
                observer("push", i, v, state, pushed)
            if query_cap is not None and session.total_queries > query_cap:
                return _PushRun(state, rounds, pushes, False)
    return _PushRun(state, rounds, pushes, True)


def assemble_estimate(state: PushState, estimates: McEstimates, n: int) -> float:
    """Reserves over ``n`` plus Monte Carlo-weighted residues, levels ``0..L-1``."""
    unit = estimates.unit
    counts = estimates.counts
    total = 0.0
    for i in range(state.L):
        total += sum(state.reserves[i].values()) / n
        for v, r in state.residues[i].items():
            c = counts.get(v)
            if c:
                total += c * unit * r
    return total


def rounding_push_run(session: OracleSession, t: int, params: AlgoParams,
                      observer: Optional[Observer] = None) -> EstimateReport:
    """One full run with the explicit ``params.r_max``."""
    if params.r_max is None or not params.r_max > 0:
        raise ValueError("rounding_push_run needs a positive params.r_max")
    start = time.perf_counter()
    mc = monte_carlo(session, params.alpha, params.n_r, params.i_prime)
    part = partition(mc, params.epsilon)
    run = _push_phase(session, t, params.alpha, params.L, params.r_max, part, observer=observer)
    estimate = assemble_estimate(run.state, mc, session.n)
    return EstimateReport(
        estimate=estimate, queries=session.query_count(), params=params, seed=session.seed,
        elapsed_ms=(time.perf_counter() - start) * 1e3, r_max_schedule=[params.r_max],
        state=run.state, mc=mc, partition=part)


def adaptive_estimate(session: OracleSession, t: int, n: int, m: int, delta_in: int,
                      delta_out: int, alpha: float,
                      budget_const: float = DEFAULT_BUDGET_CONST,
                      polylog_power: float = DEFAULT_POLYLOG_POWER,
                      params: Optional[AlgoParams] = None) -> EstimateReport:
    """RoundingPush without knowing ``pi(t)``.

    The Monte Carlo phase runs once.  The push phase is then repeated with
    ``r_max = 1/2, 1/4, ...``; push-phase queries are charged against
    :func:`query_budget`.  The run that crosses the budget is abandoned and
    the last completed one is reported.  The first run always completes;
    if it alone overspends, the report is flagged ``budget_truncated``.
    Halving also stops once a run performs no rounding at all, since every
    smaller ``r_max`` would replay the same deterministic push.
    """
    start = time.perf_counter()
    if params is None:
        params = compute_params(n, m, delta_in, delta_out, alpha)
    budget = query_budget(n, m, delta_in, delta_out, alpha, budget_const, polylog_power)

    mc = monte_carlo(session, alpha, params.n_r, params.i_prime)
    part = partition(mc, params.epsilon)
    push_start = session.total_queries
    cap = push_start + int(math.floor(budget))

    schedule: list[float] = []
    best: Optional[_PushRun] = None
    best_r = 0.5
    truncated = False
    r_max = 0.5
    while True:
        schedule.append(r_max)
        run = _push_phase(session, t, alpha, params.L, r_max, part,
                          query_cap=None if best is None else cap)
        if not run.completed:
            break
        best, best_r = run, r_max
        if session.total_queries > cap:
            truncated = len(schedule) == 1
            break
        if run.rounds == 0:
            break
        r_max /= 2.0

    estimate = assemble_estimate(best.state, mc, n)
    return EstimateReport(
        estimate=estimate, queries=session.query_count(), params=params.with_r_max(best_r),
        seed=session.seed, elapsed_ms=(time.perf_counter() - start) * 1e3,
        r_max_schedule=schedule, budget=budget, budget_truncated=truncated,
        state=best.state, mc=mc, partition=part)


def event_E_check(estimates: McEstimates, tails: ScoreVector,
                  epsilon: float) -> tuple[bool, list[tuple[int, str]]]:
    """Check the three Monte Carlo accuracy conditions against exact tails.

    * marked nodes: ``|score - tail| <= tail / 20`` and ``tail >= 2 eps / 3``
    * unmarked nodes: ``tail <= 2 eps``

    Returns ``(holds, [(node, condition), ...])``.
    """
    if tails.kind != f"tail({estimates.i_prime})":
        raise ValueError(f"tails of kind {tails.kind!r} do not match i_prime={estimates.i_prime}")
    if not math.isclose(tails.alpha, estimates.alpha):
        raise ValueError(f"alpha mismatch: tails {tails.alpha}, estimates {estimates.alpha}")
    part = partition(estimates, epsilon)
    tail = tails.values
    violations: list[tuple[int, str]] = []
    for v in sorted(part.v_ge_eps):
        if v >= len(tail):
            raise ValueError(f"estimate for node {v} outside tail vector")
        est = estimates.score(v)
        if abs(est - tail[v]) > tail[v] / 20.0:
            violations.append((v, "relative-error"))
        if tail[v] < 2.0 * epsilon / 3.0:
            violations.append((v, "high-lower-bound"))
    low_bad = np.flatnonzero(tail > 2.0 * epsilon)
    for v in low_bad:
        if int(v) not in part.v_ge_eps:
            violations.append((int(v), "low-upper-bound"))
    return not violations, violations
