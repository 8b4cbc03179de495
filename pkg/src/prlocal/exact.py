"""Ground-truth PageRank quantities by truncated walk-distribution series.

Not query-limited: these read the adjacency directly and are meant for
tests, verification and reporting.  Every series is cut at the first step
``i`` with ``(1 - alpha)**i < tol``, so the dropped tail mass is below
``tol``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .graph import DirectedGraph

DEFAULT_TOL = 1e-12


@dataclass
class ScoreVector:
    """Dense per-node scores.

    ``kind`` is one of ``pagerank``, ``hop(i)``, ``tail(i)``,
    ``ppr-from(s)`` or ``contrib-to(t)``.
    """

    values: np.ndarray
    alpha: float
    kind: str

    def __getitem__(self, v):
        return self.values[v]

    def __len__(self) -> int:
        return len(self.values)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("node,value\n")
            for v, x in enumerate(self.values):
                fh.write(f"{v},{x!r}\n")


def transition_matrix(graph: DirectedGraph) -> sp.csr_matrix:
    """Row-stochastic P with P[u, v] = (#edges u->v) / d_out(u)."""
    rows, cols = [], []
    for u, nbrs in enumerate(graph.out_adj):
        rows.extend([u] * len(nbrs))
        cols.extend(nbrs)
    dout = np.array([len(a) for a in graph.out_adj], dtype=float)
    data = 1.0 / dout[rows]
    # duplicate (u, v) entries are summed, which is the multigraph semantics
    return sp.csr_matrix((data, (rows, cols)), shape=(graph.n, graph.n))


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def _check_tol(tol: float) -> None:
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")


def _series(step, x0: np.ndarray, alpha: float, tol: float, skip: int = 0) -> np.ndarray:
    """sum_{i >= skip} alpha (1-alpha)^i x_i with x_{i+1} = step(x_i)."""
    x = x0
    for _ in range(skip):
        x = step(x)
    decay = (1.0 - alpha) ** skip
    acc = alpha * decay * x
    while decay * (1.0 - alpha) >= tol:
        x = step(x)
        decay *= 1.0 - alpha
        acc = acc + alpha * decay * x
    return acc


def exact_pagerank(graph: DirectedGraph, alpha: float, tol: float = DEFAULT_TOL) -> ScoreVector:
    _check_alpha(alpha)
    _check_tol(tol)
    pt = transition_matrix(graph).T.tocsr()
    x0 = np.full(graph.n, 1.0 / graph.n)
    return ScoreVector(_series(pt.dot, x0, alpha, tol), alpha, "pagerank")


def hop_pagerank(graph: DirectedGraph, alpha: float, t: int, i_max: int) -> np.ndarray:
    """``[pi_0(t), ..., pi_{i_max}(t)]``, the exact-length termination masses."""
    _check_alpha(alpha)
    if i_max < 0:
        raise ValueError("i_max must be >= 0")
    pt = transition_matrix(graph).T.tocsr()
    x = np.full(graph.n, 1.0 / graph.n)
    out = np.empty(i_max + 1)
    for i in range(i_max + 1):
        out[i] = alpha * (1.0 - alpha) ** i * x[t]
        x = pt.dot(x)
    return out


def tail_pagerank(graph: DirectedGraph, alpha: float, i_prime: int,
                  tol: float = DEFAULT_TOL) -> ScoreVector:
    """Per-node ``sum_{i >= i_prime} pi_i(v)``."""
    _check_alpha(alpha)
    _check_tol(tol)
    if i_prime < 0:
        raise ValueError("i_prime must be >= 0")
    pt = transition_matrix(graph).T.tocsr()
    x0 = np.full(graph.n, 1.0 / graph.n)
    return ScoreVector(_series(pt.dot, x0, alpha, tol, skip=i_prime), alpha, f"tail({i_prime})")


def contributions_to(graph: DirectedGraph, alpha: float, t: int,
                     tol: float = DEFAULT_TOL) -> ScoreVector:
    """``pi(v, t)`` for every source ``v``."""
    _check_alpha(alpha)
    _check_tol(tol)
    if not 0 <= t < graph.n:
        raise ValueError(f"invalid target {t}")
    p = transition_matrix(graph)
    e = np.zeros(graph.n)
    e[t] = 1.0
    return ScoreVector(_series(p.dot, e, alpha, tol), alpha, f"contrib-to({t})")


def ppr_from(graph: DirectedGraph, alpha: float, s: int, tol: float = DEFAULT_TOL) -> ScoreVector:
    """``pi(s, v)`` for every target ``v``."""
    _check_alpha(alpha)
    _check_tol(tol)
    pt = transition_matrix(graph).T.tocsr()
    e = np.zeros(graph.n)
    e[s] = 1.0
    return ScoreVector(_series(pt.dot, e, alpha, tol), alpha, f"ppr-from({s})")
