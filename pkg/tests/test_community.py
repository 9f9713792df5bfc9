import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depnet.community import (Partition, RefactoringRecommendation, compare_partitions,
                              declared_partition, detect_communities, level_view, modularity,
                              recommend_refactorings)
from depnet.errors import EmptyGraph, IncompletePartition, InvalidParameter, NodeSetMismatch
from depnet.graph import DepEdge, Entity, EntityKind, GraphBuilder, UndirectedGraph

from oracles import ari_contingency, best_modularity, brute_modularity, random_simple_graph

TRIANGLES = [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f")]
BARBELL = TRIANGLES + [("c", "d")]


def ug(nodes, edges):
    return UndirectedGraph.from_edges(nodes, edges)


def test_modularity_examples():
    g = ug("abcdef", TRIANGLES)
    assert modularity(g, Partition.from_groups(["abcdef"])) == pytest.approx(0.0, abs=1e-12)
    assert modularity(g, Partition.from_groups(["abc", "def"])) == pytest.approx(0.5, abs=1e-12)


def test_modularity_barbell_optimum():
    g = ug("abcdef", BARBELL)
    wedges = [(a, b, 1.0) for a, b in BARBELL]
    assert best_modularity(list("abcdef"), wedges) == pytest.approx(5 / 14, abs=1e-12)
    assert modularity(g, Partition.from_groups(["abc", "def"])) == pytest.approx(0.357142857, abs=1e-9)


def test_modularity_errors():
    with pytest.raises(EmptyGraph):
        modularity(ug([], []), Partition({}))
    with pytest.raises(EmptyGraph):
        modularity(ug("ab", []), Partition.from_groups(["ab"]))
    with pytest.raises(IncompletePartition):
        modularity(ug("ab", [("a", "b")]), Partition.from_groups(["a"]))


@pytest.mark.parametrize("seed", range(20))
def test_modularity_matches_double_sum(seed):
    rng = np.random.default_rng(seed)
    nodes, edges = random_simple_graph(int(rng.integers(2, 10)), 0.4, rng)
    if not edges:
        return
    weights = rng.integers(1, 4, len(edges)).astype(float)
    g = UndirectedGraph.from_edges(nodes, [(a, b, w) for (a, b), w in zip(edges, weights)])
    labels = {v: int(rng.integers(0, 3)) for v in nodes}
    groups = [[v for v in nodes if labels[v] == c] for c in range(3)]
    groups = [x for x in groups if x]
    want = brute_modularity(nodes, [(a, b, w) for (a, b), w in zip(edges, weights)], groups)
    assert modularity(g, Partition.from_labels(labels)) == pytest.approx(want, abs=1e-12)


def test_detect_barbell():
    p = detect_communities(ug("abcdef", BARBELL))
    assert p.groups() == [list("abc"), list("def")]


def test_detect_clique():
    k5 = list(itertools.combinations("abcde", 2))
    assert detect_communities(ug("abcde", k5)).n_communities == 1


def test_detect_never_merges_components():
    g = ug("abcdefgh", TRIANGLES + [("g", "h")])
    p = detect_communities(g)
    assert p.groups() == [list("abc"), list("def"), list("gh")]


def test_detect_empty():
    with pytest.raises(EmptyGraph):
        detect_communities(ug("ab", []))


def test_detect_deterministic_and_seeded():
    rng = np.random.default_rng(3)
    nodes, edges = random_simple_graph(40, 0.12, rng)
    g = ug(nodes, edges)
    assert detect_communities(g) == detect_communities(g)
    assert detect_communities(g, 5, randomize=True) == detect_communities(g, 5, randomize=True)


@pytest.mark.parametrize("seed", range(25))
def test_detect_near_optimum(seed):
    rng = np.random.default_rng(seed)
    nodes, edges = random_simple_graph(int(rng.integers(3, 9)), rng.uniform(0.25, 0.6), rng)
    if not edges:
        return
    g = ug(nodes, edges)
    best = best_modularity(nodes, [(a, b, 1.0) for a, b in edges])
    q = modularity(g, detect_communities(g))
    assert q >= 0.95 * best - 1e-12


@given(st.integers(2, 20), st.floats(0.1, 0.5), st.integers(0, 2 ** 31))
@settings(max_examples=40, deadline=None)
def test_detect_properties(n, p, seed):
    rng = np.random.default_rng(seed)
    nodes, edges = random_simple_graph(n, p, rng)
    if not edges:
        return
    g = ug(nodes, edges)
    part = detect_communities(g)
    assert set(part.assignment) == set(nodes)
    assert sorted(set(part.assignment.values())) == list(range(part.n_communities))
    q = modularity(g, part)
    assert q >= modularity(g, Partition.from_groups([nodes])) - 1e-12
    assert -0.5 - 1e-12 <= q <= 1.0


# -- partition comparison -----------------------------------------------------

def test_ari_examples():
    a = Partition.from_groups(["ab", "cd"])
    assert compare_partitions(a, a) == 1.0
    singles = Partition.from_groups(["a", "b", "c", "d"])
    assert compare_partitions(singles, Partition.from_groups(["abcd"])) == pytest.approx(0.0, abs=1e-12)
    assert compare_partitions(a, Partition.from_groups(["ac", "bd"])) == pytest.approx(-0.5, abs=1e-12)
    with pytest.raises(NodeSetMismatch):
        compare_partitions(a, Partition.from_groups(["abc"]))


@given(st.lists(st.integers(0, 3), min_size=2, max_size=15), st.integers(0, 2 ** 31))
@settings(max_examples=80, deadline=None)
def test_ari_oracle_and_symmetry(labels, seed):
    rng = np.random.default_rng(seed)
    other = rng.integers(0, 3, len(labels))
    a = {f"v{i}": c for i, c in enumerate(labels)}
    b = {f"v{i}": int(c) for i, c in enumerate(other)}
    pa, pb = Partition.from_labels(a), Partition.from_labels(b)
    assert compare_partitions(pa, pb) == pytest.approx(compare_partitions(pb, pa), abs=1e-12)
    try:
        want = ari_contingency(a, b)
    except ZeroDivisionError:
        return
    assert compare_partitions(pa, pb) == pytest.approx(want, abs=1e-12)


def test_partition_labels():
    p = Partition.from_labels({"x": "S2", "a": "S1", "b": "S2"})
    assert p.assignment == {"a": 0, "b": 1, "x": 1}
    assert p.group_of("x") == "S2" and p.label(0) == "S1"


# -- recommendations ------------------------------------------------------------

def k4_fixture():
    g = ug("abcd", list(itertools.combinations("abcd", 2)))
    declared = Partition.from_labels({"a": "S1", "b": "S1", "c": "S1", "d": "S2"})
    return g, declared


def test_recommend_example():
    g, declared = k4_fixture()
    predicted = detect_communities(g)
    assert predicted.n_communities == 1
    recs = recommend_refactorings(g, declared, predicted)
    assert recs == [RefactoringRecommendation("d", "S2", "S1", 0.75)]
    assert recommend_refactorings(g, declared, predicted, min_confidence=1.0) == []


def test_recommend_agreement_is_empty():
    g, declared = k4_fixture()
    assert recommend_refactorings(g, declared, declared) == []


def test_recommend_errors():
    g, declared = k4_fixture()
    with pytest.raises(InvalidParameter):
        recommend_refactorings(g, declared, declared, min_confidence=0.0)
    with pytest.raises(NodeSetMismatch):
        recommend_refactorings(g, declared, Partition.from_groups(["abc"]))


def test_recommend_relabel_invariance():
    g, declared = k4_fixture()
    predicted = Partition.from_groups(["abcd"])
    renamed = Partition.from_labels({"a": "X", "b": "X", "c": "X", "d": "Y"})
    a = recommend_refactorings(g, declared, predicted)
    b = recommend_refactorings(g, renamed, predicted)
    assert [(r.entity, r.confidence) for r in a] == [(r.entity, r.confidence) for r in b]
    assert b[0].suggested_group == "X"


def test_recommend_majority_tie_goes_to_smaller_label():
    g = ug("abcd", list(itertools.combinations("abcd", 2)))
    declared = Partition.from_labels({"a": "S2", "b": "S2", "c": "S1", "d": "S1"})
    recs = recommend_refactorings(g, declared, Partition.from_groups(["abcd"]))
    assert [(r.entity, r.suggested_group, r.confidence) for r in recs] == [("a", "S1", 0.5), ("b", "S1", 0.5)]


# -- declared structure -------------------------------------------------------------

def typed_graph():
    b = GraphBuilder()
    b.add_entity(Entity("S1", EntityKind.SESSION))
    b.add_entity(Entity("S2", EntityKind.SESSION))
    b.add_entity(Entity("T1", EntityKind.THEORY, parent="S1"))
    b.add_entity(Entity("T2", EntityKind.THEORY, parent="S1"))
    b.add_entity(Entity("T3", EntityKind.THEORY, parent="S2"))
    b.add_entity(Entity("f1", EntityKind.FACT, parent="T1"))
    b.add_entity(Entity("f2", EntityKind.FACT, parent="T3"))
    b.add_entity(Entity("c", EntityKind.CONSTANT))
    for s, d in [("T2", "T1"), ("T3", "T1"), ("f2", "f1"), ("f1", "c")]:
        b.add_edge(DepEdge(s, d))
    return b.seal()


def test_declared_partition():
    p = declared_partition(typed_graph(), "session")
    assert p.group_of("f2") == "S2" and p.group_of("T1") == "S1" and p.group_of("S2") == "S2"
    assert p.group_of("c") == "(none)"
    t = declared_partition(typed_graph(), "theory")
    assert t.group_of("f1") == "T1" and t.group_of("S1") == "(none)"
    with pytest.raises(InvalidParameter):
        declared_partition(typed_graph(), "module")


def test_level_view():
    sub, declared = level_view(typed_graph(), "session")
    assert sorted(sub.ids) == ["T1", "T2", "T3"]
    assert declared.groups() == [["T1", "T2"], ["T3"]]
    sub, declared = level_view(typed_graph(), "theory")
    assert sorted(sub.ids) == ["c", "f1", "f2"]
    assert declared.group_of("c") == "(none)"


def test_fine_tuning_escapes_greedy_optimum():
    # plain Louvain merges everything here (Q = 0); the optimum is 1/9
    nodes = [f"v{i}" for i in range(7)]
    edges = [("v0", "v4"), ("v0", "v5"), ("v0", "v6"), ("v2", "v4"), ("v2", "v5"), ("v4", "v6")]
    g = ug(nodes, edges)
    assert modularity(g, detect_communities(g, refine=False)) == pytest.approx(0.0, abs=1e-12)
    best = best_modularity(nodes, [(a, b, 1.0) for a, b in edges])
    assert best == pytest.approx(1 / 9, abs=1e-12)
    assert modularity(g, detect_communities(g)) == pytest.approx(best, abs=1e-12)


def test_fine_tuning_never_lowers_q():
    rng = np.random.default_rng(11)
    nodes, edges = random_simple_graph(60, 0.08, rng)
    g = ug(nodes, edges)
    assert modularity(g, detect_communities(g)) >= modularity(g, detect_communities(g, refine=False)) - 1e-12
