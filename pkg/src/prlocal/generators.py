"""Small deterministic fixtures and seeded random graph generators.

Emission order (which fixes PARENT/CHILD numbering) is documented per
generator.
"""
from __future__ import annotations

import numpy as np

from .graph import DirectedGraph


def self_loop() -> DirectedGraph:
    """Single node with a self-loop."""
    return DirectedGraph(1, [(0, 0)])


def two_cycle() -> DirectedGraph:
    """0 -> 1 -> 0."""
    return DirectedGraph(2, [(0, 1), (1, 0)])


def chain3() -> DirectedGraph:
    """a -> b -> c with a self-loop on c (nodes 0, 1, 2)."""
    return DirectedGraph(3, [(0, 1), (1, 2), (2, 2)])


def regular_edges(n: int, d: int, seed: int) -> list[tuple[int, int]]:
    """Edges of a union of ``d`` uniform random permutations.

    Every node gets in-degree and out-degree exactly ``d`` (self-loops and
    parallel edges are possible).  Emitted node by node, permutation by
    permutation.
    """
    rng = np.random.default_rng(seed)
    perms = [rng.permutation(n) for _ in range(d)]
    return [(v, int(p[v])) for v in range(n) for p in perms]


def random_regular(n: int, d: int, seed: int) -> DirectedGraph:
    return DirectedGraph(n, regular_edges(n, d, seed))


def random_out_graph(n: int, max_out: int, seed: int) -> DirectedGraph:
    """Each node draws an out-degree in ``[1, max_out]`` and uniform targets.

    In-degrees are whatever falls out, so degrees are mixed and some nodes
    may have no in-neighbors.
    """
    rng = np.random.default_rng(seed)
    degs = rng.integers(1, max_out + 1, size=n)
    edges = []
    for u in range(n):
        for v in rng.integers(0, n, size=degs[u]):
            edges.append((u, int(v)))
    return DirectedGraph(n, edges)
