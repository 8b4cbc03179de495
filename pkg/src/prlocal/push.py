"""Backward push: residue/reserve state and the pushback operation.

Two state shapes are used.  :class:`FlatPushState` holds one residue and one
reserve map and backs the classic threshold push.  :class:`PushState` keeps
a separate pair of maps per level; a pushback at level ``i`` settles mass
into the level-``i`` reserve and propagates into the level-``i+1`` residues.

Observers are plain callables ``observer(event, level, v, state, *payload)``
used by tests to watch every rounding and pushback.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .exact import ScoreVector
from .graph import OracleSession

Observer = Callable[..., None]


@dataclass
class FlatPushState:
    target: int
    alpha: float
    reserve: dict[int, float] = field(default_factory=dict)
    residue: dict[int, float] = field(default_factory=dict)

    @classmethod
    def initial(cls, target: int, alpha: float) -> FlatPushState:
        return cls(target, alpha, {}, {target: 1.0})


@dataclass
class PushState:
    """Leveled state for levels ``0..L`` (``L + 1`` map pairs)."""

    target: int
    alpha: float
    L: int
    reserves: list[dict[int, float]]
    residues: list[dict[int, float]]

    @classmethod
    def initial(cls, target: int, alpha: float, L: int) -> PushState:
        if L < 1:
            raise ValueError(f"L must be >= 1, got {L}")
        reserves = [{} for _ in range(L + 1)]
        residues = [{} for _ in range(L + 1)]
        residues[0][target] = 1.0
        return cls(target, alpha, L, reserves, residues)

    def to_json(self) -> dict[str, dict[str, dict[str, float]]]:
        """``{level: {node: {"p": .., "r": ..}}}`` with only nonzero entries."""
        out: dict[str, dict[str, dict[str, float]]] = {}
        for i in range(self.L + 1):
            nodes = sorted(set(self.reserves[i]) | set(self.residues[i]))
            if nodes:
                out[str(i)] = {
                    str(v): {"p": self.reserves[i].get(v, 0.0), "r": self.residues[i].get(v, 0.0)}
                    for v in nodes
                }
        return out


def pushback_flat(state: FlatPushState, v: int, session: OracleSession) -> list[int]:
    """One pushback on ``v``; returns the in-neighbors whose residue grew.

    The residue of ``v`` is cleared before propagation so that a self-loop
    keeps its share of the pushed mass.
    """
    r = state.residue.pop(v, 0.0)
    if r <= 0.0:
        raise ValueError(f"pushback on node {v} with zero residue")
    alpha = state.alpha
    state.reserve[v] = state.reserve.get(v, 0.0) + alpha * r
    spread = (1.0 - alpha) * r
    residue = state.residue
    touched = []
    d = session.indeg(v)
    for j in range(1, d + 1):
        u = session.parent(v, j)
        residue[u] = residue.get(u, 0.0) + spread / session.outdeg(u)
        touched.append(u)
    return touched


def approx_contributions(session: OracleSession, t: int, r_max: float, alpha: float,
                         on_push: Optional[Callable[[FlatPushState, int], None]] = None
                         ) -> FlatPushState:
    """Push from ``t`` until every residue is below ``r_max``.

    Nodes are processed FIFO; a node is queued when its residue reaches
    ``r_max``.  ``on_push(state, v)`` fires after every pushback.
    """
    if not r_max > 0:
        raise ValueError(f"r_max must be positive, got {r_max}")
    state = FlatPushState.initial(t, alpha)
    queue: deque[int] = deque()
    queued: set[int] = set()
    if state.residue[t] >= r_max:
        queue.append(t)
        queued.add(t)
    while queue:
        v = queue.popleft()
        queued.discard(v)
        for u in pushback_flat(state, v, session):
            if u not in queued and state.residue.get(u, 0.0) >= r_max:
                queue.append(u)
                queued.add(u)
        if on_push is not None:
            on_push(state, v)
    return state


def pushback_level(state: PushState, level: int, v: int, session: OracleSession) -> float:
    """Pushback on ``v`` at ``level``; returns the residue that was pushed."""
    res = state.residues[level]
    r = res.pop(v, 0.0)
    if r <= 0.0:
        raise ValueError(f"pushback on node {v} with zero residue at level {level}")
    alpha = state.alpha
    state.reserves[level][v] = alpha * r
    nxt = state.residues[level + 1]
    spread = (1.0 - alpha) * r
    d = session.indeg(v)
    for j in range(1, d + 1):
        u = session.parent(v, j)
        nxt[u] = nxt.get(u, 0.0) + spread / session.outdeg(u)
    return r


def push_without_threshold(session: OracleSession, t: int, L: int, alpha: float,
                           observer: Optional[Observer] = None) -> PushState:
    """Deterministic leveled push: every nonzero residue at levels ``0..L-1``.

    Observer events: ``("push", level, v, state, r_pushed)``.
    """
    state = PushState.initial(t, alpha, L)
    for i in range(L):
        for v in sorted(state.residues[i]):
            r = pushback_level(state, i, v, session)
            if observer is not None:
                observer("push", i, v, state, r)
    return state


def y_value(state: PushState, exact_pi: ScoreVector, n: int) -> float:
    """Sum over levels ``0..L-1`` of ``p_i(v)/n + pi(v) r_i(v)``.

    Needs the exact PageRank vector, so it is a verification aid only.
    """
    if exact_pi.kind != "pagerank":
        raise ValueError(f"expected a pagerank vector, got kind {exact_pi.kind!r}")
    if len(exact_pi) != n:
        raise ValueError(f"score vector has {len(exact_pi)} entries, expected n={n}")
    pi = exact_pi.values
    total = 0.0
    for i in range(state.L):
        total += sum(state.reserves[i].values()) / n
        total += sum(pi[v] * r for v, r in state.residues[i].items())
    return total
