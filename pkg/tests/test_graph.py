import pytest
from hypothesis import given, settings, strategies as st

from prlocal.graph import (DirectAccessError, DirectedGraph, GraphError, OracleQueryError,
                           OracleSession, format_edge_list, load_edge_list, oracle_only,
                           parse_edge_list, query_count, replay, write_edge_list)
from prlocal.generators import chain3, random_out_graph, random_regular, two_cycle


def test_degrees_and_neighbor_order():
    g = DirectedGraph(3, [(0, 1), (2, 1), (1, 2), (1, 0)])
    s = OracleSession(g)
    assert s.indeg(1) == 2
    assert [s.parent(1, 1), s.parent(1, 2)] == [0, 2]
    assert [s.child(1, 1), s.child(1, 2)] == [2, 0]
    assert s.outdeg(1) == 2
    assert g.delta_in == 2 and g.delta_out == 2 and g.m == 4


def test_counts_per_kind():
    s = OracleSession(two_cycle(), seed=1)
    s.indeg(0)
    s.outdeg(0)
    s.outdeg(1)
    s.parent(0, 1)
    s.child(1, 1)
    s.jump()
    c = query_count(s)
    assert (c.indeg, c.outdeg, c.parent, c.child, c.jump) == (1, 2, 1, 1, 1)
    assert c.total == 6 == s.total_queries
    assert c.as_dict()["total"] == 6


@pytest.mark.parametrize("call", [
    lambda s: s.parent(0, 0),
    lambda s: s.parent(0, 2),
    lambda s: s.child(1, 5),
    lambda s: s.indeg(2),
    lambda s: s.outdeg(-1),
])
def test_bad_queries_raise(call):
    with pytest.raises(OracleQueryError):
        call(OracleSession(two_cycle()))


def test_jump_is_uniform_and_seeded():
    g = random_regular(10, 2, seed=0)
    a = [OracleSession(g, seed=5).jump() for _ in range(3)]
    assert len(set(a)) == 1
    s = OracleSession(g, seed=3)
    hits = [0] * 10
    for _ in range(20000):
        hits[s.jump()] += 1
    assert min(hits) > 1800 and max(hits) < 2200


def test_zero_out_degree_rejected():
    with pytest.raises(GraphError):
        DirectedGraph(2, [(0, 1)])


def test_out_of_range_edge_rejected():
    with pytest.raises(GraphError):
        DirectedGraph(2, [(0, 2), (1, 0)])


def test_oracle_only_blocks_direct_access():
    g = chain3()
    with oracle_only():
        with pytest.raises(DirectAccessError):
            g.out_adj
        with pytest.raises(DirectAccessError):
            g.in_adj
        # the oracle itself still works
        assert OracleSession(g).parent(2, 2) == 2
    assert g.out_adj[0] == (1,)


def test_edge_list_round_trip(tmp_path):
    g = random_out_graph(30, 3, seed=4)
    path = tmp_path / "g.txt"
    write_edge_list(path, g.n, list(g.edges()))
    h = load_edge_list(path)
    assert list(h.edges()) == list(g.edges())
    assert path.read_bytes() == format_edge_list(g.n, list(g.edges())).encode()


@pytest.mark.parametrize("text", ["", "3\n0 1\n", "2 2\n0 1\n", "2 1\n0 x\n", "2 1\n0 1 2\n"])
def test_parse_errors(text):
    with pytest.raises(GraphError):
        parse_edge_list(text.splitlines())


def test_parse_skips_blank_lines():
    g = parse_edge_list(["2 2", "", "0 1", "  ", "1 0"])
    assert g.m == 2


def test_trace_replay():
    g = random_regular(20, 2, seed=1)
    s = OracleSession(g, seed=9, trace=True)
    v = s.jump()
    for _ in range(10):
        v = s.child(v, s.rng.randrange(s.outdeg(v)) + 1)
    s.parent(v, 1)
    r = replay(g, 9, s.trace)
    assert r.query_count() == s.query_count()


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 30), d=st.integers(1, 4), seed=st.integers(0, 10 ** 6))
def test_regular_generator_degrees(n, d, seed):
    g = random_regular(n, d, seed)
    assert all(g.out_degree(v) == d and g.in_degree(v) == d for v in range(n))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 40), k=st.integers(1, 5), seed=st.integers(0, 10 ** 6))
def test_in_and_out_adjacency_agree(n, k, seed):
    g = random_out_graph(n, k, seed)
    s = OracleSession(g)
    fwd = sorted((u, s.child(u, i)) for u in range(n) for i in range(1, s.outdeg(u) + 1))
    bwd = sorted((s.parent(v, i), v) for v in range(n) for i in range(1, s.indeg(v) + 1))
    assert fwd == bwd
