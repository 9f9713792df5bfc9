import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depnet.errors import InvalidParameter
from depnet.graph import DepEdge, Entity, EntityKind, GraphBuilder, UndirectedGraph
from depnet.metrics import (EXACT, NodeMetrics, Sampled, betweenness, centrality,
                            compute_node_metrics, local_clustering, parse_betweenness_mode)
from depnet.nullmodels import erdos_renyi

from oracles import adjacency, brute_betweenness, brute_clustering, pagerank_linear, random_simple_graph


def directed(nodes, edges):
    b = GraphBuilder()
    for v in nodes:
        b.add_entity(Entity(v, EntityKind.FACT))
    for s, d in edges:
        b.add_edge(DepEdge(s, d))
    return b.seal()


def ug(nodes, edges):
    return UndirectedGraph.from_edges(nodes, edges)


def test_clustering_examples():
    tri = ug("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    assert local_clustering(tri, "a") == 1.0
    path = ug("abc", [("a", "b"), ("b", "c")])
    assert local_clustering(path, "b") == 0.0
    assert local_clustering(path, "a") == 0.0


def test_betweenness_examples():
    assert betweenness(ug("abc", [("a", "b"), ("b", "c")])) == {"a": 0.0, "b": 1.0, "c": 0.0}
    star = betweenness(ug("cxyz", [("c", "x"), ("c", "y"), ("c", "z")]))
    assert star["c"] == 3.0 and star["x"] == 0.0


def test_betweenness_even_split():
    # two shortest a-d paths through b and c
    b = betweenness(ug("abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]))
    assert b == {"a": 0.5, "b": 0.5, "c": 0.5, "d": 0.5}


@pytest.mark.parametrize("seed", range(15))
def test_against_brute_force(seed):
    rng = np.random.default_rng(seed)
    nodes, edges = random_simple_graph(int(rng.integers(2, 13)), rng.uniform(0.1, 0.6), rng)
    g = ug(nodes, edges)
    adj = adjacency(nodes, edges)
    bc = betweenness(g)
    want = brute_betweenness(adj)
    for v in nodes:
        assert bc[v] == pytest.approx(want[v], abs=1e-9)
        assert local_clustering(g, v) == pytest.approx(brute_clustering(adj, v), abs=1e-12)


def test_sampled_full_equals_exact():
    g = erdos_renyi(80, 0.05, 3).undirected_projection()
    assert betweenness(g, Sampled(80, 5)) == betweenness(g, EXACT)
    assert betweenness(g, Sampled(500, 5)) == betweenness(g, EXACT)


def test_sampled_deterministic_and_unbiased_scale():
    g = erdos_renyi(200, 0.03, 4).undirected_projection()
    a = betweenness(g, Sampled(50, 9))
    assert a == betweenness(g, Sampled(50, 9))
    exact = betweenness(g)
    assert sum(a.values()) == pytest.approx(sum(exact.values()), rel=0.25)


def test_modes_parse():
    assert parse_betweenness_mode("exact") == EXACT
    assert parse_betweenness_mode("sampled:12", 3) == Sampled(12, 3)
    for bad in ("sampled:x", "approx"):
        with pytest.raises(InvalidParameter):
            parse_betweenness_mode(bad)
    with pytest.raises(InvalidParameter):
        betweenness(ug("ab", [("a", "b")]), Sampled(0))


def test_centrality_examples():
    c = centrality(directed("ab", [("a", "b"), ("b", "a")]))
    assert c["a"] == pytest.approx(0.5, abs=1e-9) and c["b"] == pytest.approx(0.5, abs=1e-9)
    c = centrality(directed("abcd", []))
    assert all(v == pytest.approx(0.25, abs=1e-12) for v in c.values())


def test_centrality_chain():
    c = centrality(directed("abc", [("a", "b"), ("b", "c")]))
    frozen = {"a": 0.184417, "b": 0.341171, "c": 0.474412}
    oracle = pagerank_linear(list("abc"), [("a", "b"), ("b", "c")], 0.85)
    for v in "abc":
        assert c[v] == pytest.approx(frozen[v], abs=1e-6)
        assert c[v] == pytest.approx(oracle[v], abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_centrality_against_linear_solve(seed):
    g = erdos_renyi(40, 0.05, seed)
    c = centrality(g)
    oracle = pagerank_linear(g.ids, [(e.src, e.dst) for e in g.edges()], 0.85)
    assert abs(sum(c.values()) - 1.0) <= 1e-9
    for v in g.ids:
        assert c[v] == pytest.approx(oracle[v], abs=1e-9)


def test_centrality_invalid():
    with pytest.raises(InvalidParameter):
        centrality(directed("a", []), damping=1.0)
    assert centrality(GraphBuilder().seal()) == {}


def test_node_metrics_single():
    (row,) = compute_node_metrics(directed("a", []))
    assert row == NodeMetrics("a", 0, 0, 1, 0, 0.0, 0.0, 1.0)


def test_node_metrics_triangle():
    rows = compute_node_metrics(directed("abc", [("a", "b"), ("b", "c"), ("c", "a")]))
    for r in rows:
        assert (r.in_degree, r.out_degree, r.ego_nodes, r.ego_edges) == (1, 1, 3, 3)
        assert r.clustering == 1.0 and r.betweenness == 0.0
        assert r.centrality == pytest.approx(1 / 3, abs=1e-12)


@given(st.integers(3, 14), st.integers(0, 2 ** 31))
@settings(max_examples=30, deadline=None)
def test_tree_clustering_zero(n, seed):
    rng = np.random.default_rng(seed)
    nodes = [f"t{i}" for i in range(n)]
    edges = [(nodes[i], nodes[int(rng.integers(0, i))]) for i in range(1, n)]
    rows = compute_node_metrics(directed(nodes, edges))
    assert all(r.clustering == 0.0 for r in rows)
    assert sum(r.betweenness for r in rows) == pytest.approx(
        sum(brute_betweenness(adjacency(nodes, edges)).values()), abs=1e-9)


@given(st.integers(2, 10), st.floats(0.1, 0.7), st.integers(0, 2 ** 31))
@settings(max_examples=30, deadline=None)
def test_relabel_invariance(n, p, seed):
    rng = np.random.default_rng(seed)
    nodes, und = random_simple_graph(n, p, rng)
    edges = [(a, b) if rng.random() < 0.5 else (b, a) for a, b in und]
    perm = rng.permutation(n)
    rename = {v: f"w{perm[i]}" for i, v in enumerate(nodes)}
    a = {r.node: r for r in compute_node_metrics(directed(nodes, edges))}
    b = {r.node: r for r in compute_node_metrics(directed(
        sorted(rename.values()), [(rename[s], rename[d]) for s, d in edges]))}
    for v in nodes:
        x, y = a[v], b[rename[v]]
        assert (x.in_degree, x.out_degree, x.ego_nodes, x.ego_edges) == \
            (y.in_degree, y.out_degree, y.ego_nodes, y.ego_edges)
        assert x.clustering == pytest.approx(y.clustering, abs=1e-12)
        assert x.betweenness == pytest.approx(y.betweenness, abs=1e-9)
        assert x.centrality == pytest.approx(y.centrality, abs=1e-9)
