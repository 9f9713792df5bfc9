import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depnet.errors import InvalidParameter
from depnet.graph import DepEdge, Entity, EntityKind, GraphBuilder
from depnet.mining import (AssociationRule, ExtractionSummary, FrequentItemset, Transaction,
                           association_rules, extract_transactions, frequent_itemsets,
                           relative_support, suggest_premises)

from oracles import brute_itemsets, brute_rules, random_db

HAND = [{"A", "B"}, {"A", "B", "C"}, {"A", "C"}, {"B"}]


def as_dict(itemsets):
    return {frozenset(f.items): f.support for f in itemsets}


def test_hand_itemsets():
    got = frequent_itemsets(HAND, 2)
    assert got == [FrequentItemset(("A",), 3), FrequentItemset(("B",), 3), FrequentItemset(("C",), 2),
                   FrequentItemset(("A", "B"), 2), FrequentItemset(("A", "C"), 2)]


def test_min_support_bounds():
    assert frequent_itemsets(HAND, 5) == []
    with pytest.raises(InvalidParameter):
        frequent_itemsets(HAND, 0)
    assert frequent_itemsets([], 1) == []


def test_relative_support():
    assert relative_support(0.5, 4) == 2
    assert relative_support(0.3, 10) == 3
    assert relative_support(0.01, 10) == 1
    with pytest.raises(InvalidParameter):
        relative_support(0.0, 10)


def test_hand_rules():
    sets = frequent_itemsets(HAND, 2)
    rules = association_rules(sets, HAND, 0.5)
    ab = [r for r in rules if r.antecedent == ("A",) and r.consequent == ("B",)]
    assert len(ab) == 1 and ab[0].confidence == pytest.approx(2 / 3) and ab[0].support == 2
    assert not any(r.antecedent == ("A",) and r.consequent == ("B",)
                   for r in association_rules(sets, HAND, 0.7))
    strict = association_rules(sets, HAND, 1.0)
    assert strict == [AssociationRule(("C",), ("A",), 2, 1.0)]


def test_rules_sorted():
    sets = frequent_itemsets(HAND, 1)
    rules = association_rules(sets, HAND, 0.1)
    keys = [(-r.confidence, -r.support) for r in rules]
    assert keys == sorted(keys)
    with pytest.raises(InvalidParameter):
        association_rules(sets, HAND, 0.0)


@pytest.mark.parametrize("seed", range(30))
def test_against_brute_force(seed):
    rng = np.random.default_rng(seed)
    db = random_db(rng)
    ms = int(rng.integers(1, 5))
    got = frequent_itemsets(db, ms)
    assert as_dict(got) == brute_itemsets(db, ms)
    assert len(got) == len(as_dict(got))
    conf = float(rng.uniform(0.2, 1.0))
    rules = association_rules(got, db, conf)
    want = brute_rules(db, ms, conf)
    got_rules = {(frozenset(r.antecedent), frozenset(r.consequent)): (r.support, r.confidence) for r in rules}
    assert got_rules.keys() == want.keys()
    for key, (sup, c) in want.items():
        assert got_rules[key][0] == sup
        assert got_rules[key][1] == pytest.approx(c, abs=1e-12)


dbs = st.lists(st.sets(st.sampled_from("abcdefgh"), min_size=1), max_size=30)


@given(dbs, st.integers(1, 4))
@settings(max_examples=80, deadline=None)
def test_downward_closure_and_monotone(db, ms):
    found = as_dict(frequent_itemsets(db, ms))
    for s, sup in found.items():
        for item in s:
            sub = s - {item}
            if sub:
                assert sub in found and found[sub] >= sup


@given(dbs, st.integers(1, 4), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_permutation_invariance(db, ms, rnd):
    shuffled = list(db)
    rnd.shuffle(shuffled)
    assert frequent_itemsets(db, ms) == frequent_itemsets(shuffled, ms)


@given(dbs, st.integers(1, 3), st.floats(0.1, 1.0))
@settings(max_examples=60, deadline=None)
def test_rule_invariants(db, ms, conf):
    for r in association_rules(frequent_itemsets(db, ms), db, conf):
        assert not set(r.antecedent) & set(r.consequent)
        a = sum(1 for t in db if set(r.antecedent) <= t)
        both = sum(1 for t in db if set(r.antecedent) | set(r.consequent) <= t)
        assert r.support == both and r.confidence == pytest.approx(both / a)
        assert 0 < r.confidence <= 1


# -- transactions ---------------------------------------------------------------

def fact_graph():
    b = GraphBuilder()
    for v, k in [("f1", EntityKind.FACT), ("f2", EntityKind.FACT), ("f3", EntityKind.FACT),
                 ("c1", EntityKind.CONSTANT), ("ty", EntityKind.TYPECON)]:
        b.add_entity(Entity(v, k))
    for s, d in [("f1", "c1"), ("f1", "f2"), ("f2", "ty"), ("c1", "ty")]:
        b.add_edge(DepEdge(s, d))
    return b.seal()


def test_extract_transactions():
    summary = ExtractionSummary()
    ts = extract_transactions(fact_graph(), summary=summary)
    assert ts == [Transaction("f1", frozenset({"c1", "f2"}))]
    assert (summary.transactions, summary.skipped_facts) == (1, 2)
    assert extract_transactions(fact_graph(), {EntityKind.CONSTANT}) == [Transaction("f1", frozenset({"c1"}))]
    assert extract_transactions(fact_graph(), {EntityKind.TYPECON}) == [Transaction("f2", frozenset({"ty"}))]


def test_transactions_feed_mining():
    ts = extract_transactions(fact_graph())
    assert as_dict(frequent_itemsets(ts, 1)) == brute_itemsets([t.items for t in ts], 1)


# -- suggestions ---------------------------------------------------------------------

def rule(a, c, conf, sup=1):
    return AssociationRule(tuple(a), tuple(c), sup, conf)


def test_suggest_examples():
    rules = [rule("A", "B", 0.9)]
    assert suggest_premises(rules, {"A"}, 3) == ["B"]
    assert suggest_premises(rules, {"B"}, 3) == []
    with pytest.raises(InvalidParameter):
        suggest_premises(rules, {"A"}, 0)


FIVE_RULES = [
    rule("A", "X", 0.6, 3),
    rule("A", "Y", 0.8, 4),
    rule("AB", "X", 0.9, 2),
    rule("C", "Z", 1.0, 5),
    rule("B", "WY", 0.8, 6),
]


def test_suggest_five_rule_fixture():
    # X scores 0.9 via AB; W and Y tie at (0.8, support 6) and fall back to id order; Z is not applicable
    assert suggest_premises(FIVE_RULES, {"A", "B"}, 5) == ["X", "W", "Y"]
    assert suggest_premises(FIVE_RULES, {"A", "B"}, 2) == ["X", "W"]
    assert suggest_premises(FIVE_RULES, {"A"}, 5) == ["Y", "X"]
    assert suggest_premises(FIVE_RULES, {"A", "B", "X"}, 5) == ["W", "Y"]


@given(st.sets(st.sampled_from("ABCXYZW")), st.integers(1, 6))
def test_suggest_post(query, k):
    out = suggest_premises(FIVE_RULES, query, k)
    assert len(out) <= k and not set(out) & query and len(set(out)) == len(out)
