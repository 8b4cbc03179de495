"""Directed graphs and the arc-centric query oracle.

Algorithms never see a :class:`DirectedGraph` directly.  They are handed an
:class:`OracleSession`, which answers the five unit-cost queries
(``indeg``, ``outdeg``, ``parent``, ``child``, ``jump``), counts every call
and owns the only random number generator an algorithm may use.
"""
from __future__ import annotations

import contextlib
import contextvars
import random
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

QUERY_KINDS = ("indeg", "outdeg", "parent", "child", "jump")

_ORACLE_ONLY = contextvars.ContextVar("prlocal_oracle_only", default=False)


class GraphError(ValueError):
    """Malformed or unsupported graph input."""


class OracleQueryError(IndexError):
    """Query with an invalid node id or neighbor index."""


class DirectAccessError(RuntimeError):
    """Adjacency touched directly while oracle-only mode is active."""


@contextlib.contextmanager
def oracle_only():
    """Forbid direct adjacency reads for the duration of the block.

    Inside the block, ``DirectedGraph.out_adj`` / ``in_adj`` raise
    :class:`DirectAccessError`; the oracle keeps working because it holds
    its own references.
    """
    token = _ORACLE_ONLY.set(True)
    try:
        yield
    finally:
        _ORACLE_ONLY.reset(token)


class DirectedGraph:
    """Immutable directed multigraph with ordered in- and out-neighbor lists.

    The i-th child (parent) of a node is the target (source) of the i-th
    edge, in input order, leaving (entering) that node.  Every node must have
    at least one out-edge.
    """

    __slots__ = ("n", "m", "_out", "_in", "delta_in", "delta_out")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 1:
            raise GraphError(f"graph needs at least one node, got n={n}")
        out: list[list[int]] = [[] for _ in range(n)]
        inn: list[list[int]] = [[] for _ in range(n)]
        m = 0
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            out[u].append(v)
            inn[v].append(u)
            m += 1
        for v, nbrs in enumerate(out):
            if not nbrs:
                raise GraphError(f"node {v} has out-degree 0")
        self.n = n
        self.m = m
        self._out = tuple(tuple(a) for a in out)
        self._in = tuple(tuple(a) for a in inn)
        self.delta_out = max(len(a) for a in self._out)
        self.delta_in = max(len(a) for a in self._in)

    @property
    def out_adj(self) -> tuple[tuple[int, ...], ...]:
        if _ORACLE_ONLY.get():
            raise DirectAccessError("direct out-adjacency access in oracle-only mode")
        return self._out

    @property
    def in_adj(self) -> tuple[tuple[int, ...], ...]:
        if _ORACLE_ONLY.get():
            raise DirectAccessError("direct in-adjacency access in oracle-only mode")
        return self._in

    def out_degree(self, v: int) -> int:
        return len(self.out_adj[v])

    def in_degree(self, v: int) -> int:
        return len(self.in_adj[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges grouped by source, in per-source input order."""
        for u, nbrs in enumerate(self.out_adj):
            for v in nbrs:
                yield u, v

    def __repr__(self) -> str:
        return (f"DirectedGraph(n={self.n}, m={self.m}, "
                f"delta_in={self.delta_in}, delta_out={self.delta_out})")


def parse_edge_list(lines: Iterable[str]) -> DirectedGraph:
    it = iter(lines)
    try:
        header = next(it)
    except StopIteration:
        raise GraphError("empty edge list") from None
    try:
        n, m = (int(x) for x in header.split())
    except ValueError:
        raise GraphError(f"bad header line {header!r}, expected 'n m'") from None

    edges = []
    for lineno, line in enumerate(it, start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer node id in {line!r}") from None
    if len(edges) != m:
        raise GraphError(f"header declares {m} edges but {len(edges)} were listed")
    return DirectedGraph(n, edges)


def load_edge_list(path: str | Path) -> DirectedGraph:
    """Read the ``n m`` header + ``u v`` lines format."""
    with open(path, "r", encoding="ascii") as fh:
        return parse_edge_list(fh)


def format_edge_list(n: int, edges: Sequence[tuple[int, int]]) -> str:
    out = [f"{n} {len(edges)}"]
    out.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(out) + "\n"


def write_edge_list(path: str | Path, n: int, edges: Sequence[tuple[int, int]]) -> None:
    # newline="\n" keeps files byte-identical across platforms
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_edge_list(n, edges))


@dataclass(frozen=True)
class QueryCounts:
    indeg: int = 0
    outdeg: int = 0
    parent: int = 0
    child: int = 0
    jump: int = 0

    @property
    def total(self) -> int:
        return self.indeg + self.outdeg + self.parent + self.child + self.jump

    def as_dict(self) -> dict[str, int]:
        d = asdict(self)
        d["total"] = self.total
        return d

    def __sub__(self, other: QueryCounts) -> QueryCounts:
        return QueryCounts(*(getattr(self, k) - getattr(other, k) for k in QUERY_KINDS))


class OracleSession:
    """Single-owner view of a graph through the five oracle queries.

    ``n`` is exposed because it is assumed known in advance; nothing else
    about the graph is.  ``rng`` is the session's only randomness source.
    Set ``trace=True`` to record ``(kind, args, result)`` for every query.
    """

    def __init__(self, graph: DirectedGraph, seed: int | None = None, trace: bool = False):
        self._graph = graph
        self._out = graph._out
        self._in = graph._in
        self.n = graph.n
        self.seed = seed
        self.rng = random.Random(seed)
        self.trace: list[tuple] | None = [] if trace else None
        self._indeg = 0
        self._outdeg = 0
        self._parent = 0
        self._child = 0
        self._jump = 0

    def indeg(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise OracleQueryError(f"invalid node id {v}")
        self._indeg += 1
        d = len(self._in[v])
        if self.trace is not None:
            self.trace.append(("indeg", (v,), d))
        return d

    def outdeg(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise OracleQueryError(f"invalid node id {v}")
        self._outdeg += 1
        d = len(self._out[v])
        if self.trace is not None:
            self.trace.append(("outdeg", (v,), d))
        return d

    def parent(self, v: int, i: int) -> int:
        """The i-th in-neighbor of ``v`` (1-based)."""
        if not 0 <= v < self.n:
            raise OracleQueryError(f"invalid node id {v}")
        nbrs = self._in[v]
        if not 1 <= i <= len(nbrs):
            raise OracleQueryError(f"parent index {i} out of range for node {v} (d_in={len(nbrs)})")
        self._parent += 1
        u = nbrs[i - 1]
        if self.trace is not None:
            self.trace.append(("parent", (v, i), u))
        return u

    def child(self, v: int, i: int) -> int:
        """The i-th out-neighbor of ``v`` (1-based)."""
        if not 0 <= v < self.n:
            raise OracleQueryError(f"invalid node id {v}")
        nbrs = self._out[v]
        if not 1 <= i <= len(nbrs):
            raise OracleQueryError(f"child index {i} out of range for node {v} (d_out={len(nbrs)})")
        self._child += 1
        w = nbrs[i - 1]
        if self.trace is not None:
            self.trace.append(("child", (v, i), w))
        return w

    def jump(self) -> int:
        self._jump += 1
        v = self.rng.randrange(self.n)
        if self.trace is not None:
            self.trace.append(("jump", (), v))
        return v

    def query(self, kind: str, *args: int) -> int:
        """Dispatch by query name, e.g. ``query("parent", v, 2)``."""
        if kind not in QUERY_KINDS:
            raise ValueError(f"unknown query kind {kind!r}")
        return getattr(self, kind)(*args)

    def query_count(self) -> QueryCounts:
        return QueryCounts(self._indeg, self._outdeg, self._parent, self._child, self._jump)

    @property
    def total_queries(self) -> int:
        return self._indeg + self._outdeg + self._parent + self._child + self._jump


def query_count(session: OracleSession) -> QueryCounts:
    return session.query_count()


def replay(graph: DirectedGraph, seed: int | None, trace: Sequence[tuple]) -> OracleSession:
    """Re-issue a recorded query sequence on a fresh session.

    Raises ``AssertionError`` on the first diverging answer.
    """
    session = OracleSession(graph, seed=seed, trace=True)
    for kind, args, expected in trace:
        got = session.query(kind, *args)
        if got != expected:
            raise AssertionError(f"replay diverged at {kind}{args}: {got} != {expected}")
    return session
