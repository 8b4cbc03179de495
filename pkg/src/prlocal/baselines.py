"""Reference estimators: plain Monte Carlo and the bidirectional combination."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

from .graph import OracleSession, QueryCounts
from .push import approx_contributions


@dataclass
class BaselineReport:
    estimate: float
    queries: QueryCounts
    method: str
    config: dict = field(default_factory=dict)
    seed: Optional[int] = None
    elapsed_ms: float = 0.0

    def to_json(self) -> dict:
        return {
            "estimate": self.estimate,
            "queries": self.queries.as_dict(),
            "method": self.method,
            "config": dict(self.config),
            "seed": self.seed,
            "elapsed_ms": self.elapsed_ms,
        }


def walk_endpoint(session: OracleSession, alpha: float) -> int:
    """End node of one alpha-discounted walk from a uniform start."""
    rand = session.rng.random
    v = session.jump()
    while rand() >= alpha:
        d = session.outdeg(v)
        v = session.child(v, session.rng.randrange(d) + 1 if d > 1 else 1)
    return v


def chernoff_walks(n: int, alpha: float, rel_err: float = 0.5, fail: float = 0.1) -> int:
    """Walks that make plain Monte Carlo ``(1 +- rel_err)``-accurate w.p.
    ``1 - fail`` for any target, using only ``pi(t) >= alpha / n``."""
    mu = alpha / n
    lam = rel_err * mu
    # 2 exp(-lam^2 k / (2 (mu + lam/3))) <= fail
    return math.ceil(2.0 * (mu + lam / 3.0) * math.log(2.0 / fail) / lam ** 2)


def plain_mc(session: OracleSession, t: int, alpha: float, n_walks: int) -> BaselineReport:
    if n_walks < 1:
        raise ValueError(f"n_walks must be >= 1, got {n_walks}")
    start = time.perf_counter()
    rand = session.rng.random
    randrange = session.rng.randrange
    outdeg, child, jump = session.outdeg, session.child, session.jump
    hits = 0
    for _ in range(n_walks):
        v = jump()
        while rand() >= alpha:
            d = outdeg(v)
            v = child(v, randrange(d) + 1 if d > 1 else 1)
        if v == t:
            hits += 1
    return BaselineReport(hits / n_walks, session.query_count(), "plain_mc",
                          {"n_walks": n_walks}, session.seed,
                          (time.perf_counter() - start) * 1e3)


def bippr(session: OracleSession, t: int, alpha: float, r_max: float,
          n_walks: int) -> BaselineReport:
    """Reverse push to ``r_max``, then average the residue at walk endpoints.

    Unbiased because ``pi(t) = sum_v p(v)/n + sum_v pi(v) r(v)`` and a
    uniform-start walk ends at ``v`` with probability ``pi(v)``.
    """
    if n_walks < 1:
        raise ValueError(f"n_walks must be >= 1, got {n_walks}")
    start = time.perf_counter()
    state = approx_contributions(session, t, r_max, alpha)
    n = session.n
    settled = sum(state.reserve.values()) / n
    residue = state.residue
    acc = 0.0
    for _ in range(n_walks):
        acc += residue.get(walk_endpoint(session, alpha), 0.0)
    return BaselineReport(settled + acc / n_walks, session.query_count(), "bippr",
                          {"n_walks": n_walks, "r_max": r_max}, session.seed,
                          (time.perf_counter() - start) * 1e3)
