"""Lower-bound instance family ``H_0, ..., H_p``.

Layout of ``H_p`` (before node ids are shuffled):

* a reversed ``delta_in``-ary tree whose leaves ``V`` all lead to ``t``;
* ``U``: one private parent per ``V`` node (``u -> v``);
* ``W``: a regular bipartite block ``W -> V``;
* a second reversed tree with leaves ``Y`` rooted at ``u*``, the ``U``
  parent of a randomly chosen ``v*``;
* ``t -> s1``, ``s1 <-> s2`` so that ``t`` has an out-edge;
* an isolated padding component (a cycle plus round-robin chords) that tops
  the node and edge counts up to exactly ``n`` and ``m``.

``H_i`` keeps the tree edge for the first ``i * |Y| // p`` nodes of ``Y`` and
turns the other ``Y`` out-edges into self-loops.  All graphs share one node
permutation and one edge order, so consecutive graphs differ only in ``Y``
out-edges.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .exact import exact_pagerank
from .graph import DirectedGraph, write_edge_list
from .rounding_push import gamma as gamma_exponent


class InfeasibleParameters(ValueError):
    """The requested (n, m, degree caps, alpha) cannot host the construction."""


@dataclass
class ReversedTree:
    edges: list[tuple[int, int]]
    leaves: list[int]
    internal: list[int]  # excludes the root
    depth: int


def reversed_tree(leaf_count: int, delta_in: int, root: int,
                  id_allocator: Callable[[], int]) -> ReversedTree:
    """Leaves merge ``delta_in`` at a time, level by level, until at most
    ``delta_in`` nodes remain; those point at ``root``.

    Every leaf sits at the same depth ``max(1, ceil(log_delta_in(leaf_count)))``.
    Leaves are allocated first, then internal nodes bottom-up.
    """
    if leaf_count < 1:
        raise ValueError("leaf_count must be >= 1")
    if delta_in < 2:
        raise ValueError("delta_in must be >= 2")
    leaves = [id_allocator() for _ in range(leaf_count)]
    edges: list[tuple[int, int]] = []
    internal: list[int] = []
    current = leaves
    depth = 1
    while len(current) > delta_in:
        nxt = []
        for k in range(0, len(current), delta_in):
            w = id_allocator()
            nxt.append(w)
            edges.extend((x, w) for x in current[k:k + delta_in])
        internal.extend(nxt)
        current = nxt
        depth += 1
    edges.extend((x, root) for x in current)
    return ReversedTree(edges, leaves, internal, depth)


@dataclass
class HardFamily:
    graphs: list[DirectedGraph]
    edge_lists: list[list[tuple[int, int]]]
    t: int
    v_star: int
    u_star: int
    set_sizes: dict[str, int]
    d: int
    gamma: float
    p: int
    n: int
    m: int
    delta_in: int
    delta_out: int
    alpha: float
    seed: int
    y_nodes: list[int] = field(default_factory=list)

    def manifest(self) -> dict:
        return {
            "n": self.n, "m": self.m, "delta_in": self.delta_in, "delta_out": self.delta_out,
            "alpha": self.alpha, "p": self.p, "seed": self.seed, "d": self.d,
            "gamma": self.gamma, "t": self.t, "v_star": self.v_star, "u_star": self.u_star,
            "set_sizes": dict(self.set_sizes),
            "files": [f"H_{i}.txt" for i in range(self.p + 1)],
        }

    def export(self, outdir: str | Path) -> list[Path]:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = []
        for i, edges in enumerate(self.edge_lists):
            path = outdir / f"H_{i}.txt"
            write_edge_list(path, self.n, edges)
            paths.append(path)
        manifest = outdir / "manifest.json"
        manifest.write_text(json.dumps(self.manifest(), indent=2, sort_keys=True) + "\n",
                            encoding="ascii")
        paths.append(manifest)
        return paths


def target_sizes(n: int, d: int, g: float, v_const: float = 1.0, y_const: float = 1.0,
                 delta_in: int | None = None) -> tuple[int, int]:
    """``(|V|, |Y|)`` = ceil of ``n^(1/2-g) d^(g-1/2)`` and ``n^(1/2+g) d^(-1/2-g)``.

    With ``delta_in`` given, ``|Y|`` is further rounded up to ``delta_in**k``
    so the ``Y`` tree is complete and every leaf sits at depth exactly
    ``log_delta_in |Y|``.
    """
    nv = max(math.ceil(v_const * n ** (0.5 - g) * d ** (g - 0.5) - 1e-9), 1)
    ny = max(math.ceil(y_const * n ** (0.5 + g) * d ** (-0.5 - g) - 1e-9), 1)
    if delta_in is not None:
        full = 1
        while full < ny:
            full *= delta_in
        ny = max(full, delta_in)
    return nv, ny


def build_hard_family(n: int, m: int, delta_in: int, delta_out: int, alpha: float, p: int,
                      seed: int = 0, v_const: float = 1.0, y_const: float = 1.0,
                      complete_y_tree: bool = True) -> HardFamily:
    if p < 2:
        raise InfeasibleParameters(f"p must be >= 2, got {p}")
    if not 0.0 < alpha < 1.0:
        raise InfeasibleParameters(f"alpha must lie in (0, 1), got {alpha}")
    if delta_in <= 1.0 / (1.0 - alpha):
        raise InfeasibleParameters(
            f"delta_in={delta_in} <= 1/(1-alpha)={1.0 / (1.0 - alpha):g}: the lower bound is "
            "the trivial Omega(1) there, no hard family is needed")
    d = min(delta_in, delta_out)
    if d > n ** (1.0 / 3.0):
        raise InfeasibleParameters(
            f"min(delta_in, delta_out)={d} exceeds n^(1/3)={n ** (1 / 3):.3g}")
    g = gamma_exponent(alpha, delta_in)
    nv, ny = target_sizes(n, d, g, v_const, y_const,
                          delta_in if complete_y_tree else None)
    # each V node also takes one U edge, so W supplies d parents only if that fits
    k_w = d if d + 1 <= delta_in else d - 1

    rng = np.random.default_rng(seed)
    counter = iter(range(n + 10 ** 9))
    alloc = counter.__next__
    edges: list[tuple[int, int]] = []

    t = alloc()
    vtree = reversed_tree(nv, delta_in, t, alloc)
    edges.extend(vtree.edges)
    V = vtree.leaves
    U = [alloc() for _ in V]
    edges.extend(zip(U, V))
    W = [alloc() for _ in V]
    for j, w in enumerate(W):
        edges.extend((w, V[(j + k) % nv]) for k in range(k_w))
    star = int(rng.integers(nv))
    v_star, u_star = V[star], U[star]
    ytree = reversed_tree(ny, delta_in, u_star, alloc)
    y_pos = {}
    leaf_set = set(ytree.leaves)
    for e in ytree.edges:
        if e[0] in leaf_set:
            y_pos[e[0]] = len(edges)
        edges.append(e)
    s1, s2 = alloc(), alloc()
    edges.extend([(t, s1), (s1, s2), (s2, s1)])

    core_nodes = s2 + 1
    core_edges = len(edges)
    rest = n - core_nodes
    if rest < 0:
        raise InfeasibleParameters(
            f"core structure needs {core_nodes} nodes (|V|={nv}, |Y|={ny}) but n={n}")
    if rest == 0:
        if m != core_edges:
            raise InfeasibleParameters(f"no room for padding: core has {core_edges} edges, m={m}")
    else:
        chords = m - core_edges - rest
        if chords < 0:
            raise InfeasibleParameters(
                f"m={m} too small: core uses {core_edges} edges and padding needs {rest}")
        capacity = rest * (d - 1)
        if chords > capacity:
            raise InfeasibleParameters(
                f"m={m} too large: padding can absorb {capacity} extra edges under the degree caps, "
                f"{chords} needed")
        pad = [alloc() for _ in range(rest)]
        edges.extend((pad[j], pad[(j + 1) % rest]) for j in range(rest))
        k = 1
        while chords:
            for j in range(rest):
                if not chords:
                    break
                edges.append((pad[j], pad[(j + 1 + k) % rest]))
                chords -= 1
            k += 1

    perm = rng.permutation(n)
    order = rng.permutation(len(edges))
    ys = ytree.leaves
    edge_lists, graphs = [], []
    for i in range(p + 1):
        base = list(edges)
        for y in ys[i * ny // p:]:
            base[y_pos[y]] = (y, y)
        relabeled = [(int(perm[base[j][0]]), int(perm[base[j][1]])) for j in order]
        edge_lists.append(relabeled)
        graphs.append(DirectedGraph(n, relabeled))

    return HardFamily(
        graphs=graphs, edge_lists=edge_lists, t=int(perm[t]), v_star=int(perm[v_star]),
        u_star=int(perm[u_star]), set_sizes={"U": nv, "V": nv, "W": nv, "Y": ny},
        d=d, gamma=g, p=p, n=n, m=m, delta_in=delta_in, delta_out=delta_out, alpha=alpha,
        seed=seed, y_nodes=[int(perm[y]) for y in ys])


def validate_graph(graph: DirectedGraph, n: int, m: int, delta_in: int,
                   delta_out: int) -> list[str]:
    """Problems with node/edge counts or degree caps; empty when valid."""
    problems = []
    if graph.n != n:
        problems.append(f"n={graph.n}, expected {n}")
    if graph.m != m:
        problems.append(f"m={graph.m}, expected {m}")
    if graph.delta_in > delta_in:
        problems.append(f"max in-degree {graph.delta_in} exceeds cap {delta_in}")
    if graph.delta_out > delta_out:
        problems.append(f"max out-degree {graph.delta_out} exceeds cap {delta_out}")
    if min(len(a) for a in graph.out_adj) < 1:
        problems.append("node with out-degree 0")
    return problems


@dataclass
class SeparationReport:
    pagerank_t: list[float]
    ratios: list[float]
    min_ratio: float
    balance: float
    structural_problems: list[str]
    passed: bool

    def as_dict(self) -> dict:
        return {
            "pagerank_t": self.pagerank_t, "ratios": self.ratios, "min_ratio": self.min_ratio,
            "balance": self.balance, "structural_problems": self.structural_problems,
            "passed": self.passed,
        }


def balance_ratio(family: HardFamily) -> float:
    """``(1-alpha)^(log_din |Y|) |Y| / |V|``, which the construction keeps Theta(1)."""
    ny, nv = family.set_sizes["Y"], family.set_sizes["V"]
    return (1.0 - family.alpha) ** math.log(ny, family.delta_in) * ny / nv


def verify_family(family: HardFamily, c: float = 0.05, tol: float = 1e-12) -> SeparationReport:
    """Exact ``pi(t)`` in every ``H_i`` and the consecutive ratios.

    Passes when every ratio is at least ``1 + c`` and every graph passes
    :func:`validate_graph`.
    """
    pis = [float(exact_pagerank(g, family.alpha, tol)[family.t]) for g in family.graphs]
    ratios = [pis[i] / pis[i - 1] for i in range(1, len(pis))]
    problems = []
    for i, g in enumerate(family.graphs):
        problems.extend(f"H_{i}: {msg}" for msg in
                        validate_graph(g, family.n, family.m, family.delta_in, family.delta_out))
    lo = min(ratios)
    return SeparationReport(pis, ratios, lo, balance_ratio(family), problems,
                            lo >= 1.0 + c and not problems)
