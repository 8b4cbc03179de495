"""Extended alpha-discounted walks.

A walk starts at a uniformly random node, stops with probability alpha
before each step, and is then pushed ``i_prime`` further uniform steps.
Each walk deposits ``(1 - alpha)**i_prime / n_r`` on its endpoint, which
makes the estimate unbiased for the tail PageRank ``pi_{>= i_prime}``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .graph import OracleSession


@dataclass
class McEstimates:
    """Endpoint counts of ``n_r`` extended walks.

    Scores are derived as ``count * (1-alpha)**i_prime / n_r`` so that the
    total mass is exactly one increment per walk.
    """

    counts: dict[int, int]
    n_r: int
    i_prime: int
    alpha: float

    @property
    def unit(self) -> float:
        return (1.0 - self.alpha) ** self.i_prime / self.n_r

    def score(self, v: int) -> float:
        return self.counts.get(v, 0) * self.unit

    @property
    def scores(self) -> dict[int, float]:
        u = self.unit
        return {v: c * u for v, c in self.counts.items()}

    def total(self) -> float:
        return sum(self.counts.values()) * self.unit


def sample_extended_walk(session: OracleSession, alpha: float, i_prime: int) -> int:
    """Endpoint of one walk: geometric phase, then ``i_prime`` forced steps."""
    if i_prime < 0:
        raise ValueError("i_prime must be >= 0")
    rand = session.rng.random
    randrange = session.rng.randrange
    outdeg, child = session.outdeg, session.child
    v = session.jump()
    while rand() >= alpha:
        d = outdeg(v)
        v = child(v, randrange(d) + 1 if d > 1 else 1)
    for _ in range(i_prime):
        d = outdeg(v)
        v = child(v, randrange(d) + 1 if d > 1 else 1)
    return v


def monte_carlo(session: OracleSession, alpha: float, n_r: int, i_prime: int) -> McEstimates:
    if n_r < 1:
        raise ValueError(f"n_r must be >= 1, got {n_r}")
    if i_prime < 0:
        raise ValueError("i_prime must be >= 0")
    # sample_extended_walk inlined: this loop dominates the Monte Carlo phase
    rand = session.rng.random
    randrange = session.rng.randrange
    outdeg, child, jump = session.outdeg, session.child, session.jump
    extra = range(i_prime)
    counts: dict[int, int] = {}
    for _ in range(n_r):
        v = jump()
        while rand() >= alpha:
            d = outdeg(v)
            v = child(v, randrange(d) + 1 if d > 1 else 1)
        for _ in extra:
            d = outdeg(v)
            v = child(v, randrange(d) + 1 if d > 1 else 1)
        counts[v] = counts.get(v, 0) + 1
    return McEstimates(counts, n_r, i_prime, alpha)
