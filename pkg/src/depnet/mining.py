"""Frequent itemsets and association rules over fact dependency sets.

A transaction is the set of direct dependencies of one fact. Itemsets are
mined with FP-growth; rules are split from the frequent itemsets and used
to rank premise suggestions for a partially known dependency set.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import InvalidParameter
from .graph import DependencyGraph, EntityKind

DEFAULT_ITEM_KINDS = frozenset({EntityKind.FACT, EntityKind.CONSTANT})


@dataclass(frozen=True)
class Transaction:
    owner: str
    items: frozenset[str]


@dataclass(frozen=True)
class FrequentItemset:
    items: tuple[str, ...]
    support: int


@dataclass(frozen=True)
class AssociationRule:
    antecedent: tuple[str, ...]
    consequent: tuple[str, ...]
    support: int
    confidence: float


@dataclass
class ExtractionSummary:
    transactions: int = 0
    skipped_facts: int = 0


def extract_transactions(graph: DependencyGraph, item_kinds: Iterable[EntityKind] = DEFAULT_ITEM_KINDS,
                         summary: ExtractionSummary | None = None) -> list[Transaction]:
    """One transaction per fact holding its dependencies of ``item_kinds``.

    Facts without any qualifying dependency are skipped and counted in
    ``summary``.
    """
    codes = {EntityKind(k).code for k in item_kinds}
    fact = EntityKind.FACT.code
    ids = graph.ids
    kinds = graph.kind_codes
    out = []
    skipped = 0
    for i in range(graph.node_count):
        if kinds[i] != fact:
            continue
        targets = graph.dst[graph.out_indptr[i]:graph.out_indptr[i + 1]].tolist()
        items = frozenset(ids[j] for j in targets if kinds[j] in codes)
        if items:
            out.append(Transaction(ids[i], items))
        else:
            skipped += 1
    if summary is not None:
        summary.transactions = len(out)
        summary.skipped_facts = skipped
    return out


def _item_sets(transactions):
    for t in transactions:
        yield t.items if isinstance(t, Transaction) else frozenset(t)


class _Node:
    __slots__ = ("item", "count", "parent", "children")

    def __init__(self, item, parent):
        self.item = item
        self.count = 0
        self.parent = parent
        self.children = {}


def _build_tree(paths, min_support):
    """FP-tree over weighted ``(items, count)`` paths.

    Returns the header table ``item -> [nodes]`` and per-item support, with
    items ordered by descending support then id.
    """
    support = defaultdict(int)
    for items, cnt in paths:
        for it in items:
            support[it] += cnt
    frequent = {it: s for it, s in support.items() if s >= min_support}
    rank = {it: r for r, it in enumerate(sorted(frequent, key=lambda i: (-frequent[i], i)))}
    root = _Node(None, None)
    header = defaultdict(list)
    for items, cnt in paths:
        node = root
        for it in sorted((i for i in items if i in rank), key=rank.__getitem__):
            child = node.children.get(it)
            if child is None:
                child = node.children[it] = _Node(it, node)
                header[it].append(child)
            child.count += cnt
            node = child
    return header, frequent, rank


def _fp_growth(paths, min_support, suffix, out):
    header, frequent, rank = _build_tree(paths, min_support)
    # least frequent first so conditional bases stay small
    for it in sorted(frequent, key=rank.__getitem__, reverse=True):
        itemset = suffix + (it,)
        out[frozenset(itemset)] = frequent[it]
        cond = []
        for node in header[it]:
            path = []
            p = node.parent
            while p.item is not None:
                path.append(p.item)
                p = p.parent
            if path:
                cond.append((path, node.count))
        if cond:
            _fp_growth(cond, min_support, itemset, out)


def _sort_key(items):
    return (len(items), items)


def frequent_itemsets(transactions: Sequence, min_support: int) -> list[FrequentItemset]:
    """All itemsets contained in at least ``min_support`` transactions.

    Output is ordered by size, then lexicographically by the sorted items.
    """
    if min_support < 1:
        raise InvalidParameter("min_support must be >= 1")
    paths = [(s, 1) for s in _item_sets(transactions) if s]
    found: dict[frozenset, int] = {}
    _fp_growth(paths, min_support, (), found)
    res = [FrequentItemset(tuple(sorted(k)), v) for k, v in found.items()]
    res.sort(key=lambda f: _sort_key(f.items))
    return res


def relative_support(fraction: float, n_transactions: int) -> int:
    """Convert a fractional threshold to an absolute count (ceiling, at least 1)."""
    if not 0.0 < fraction <= 1.0:
        raise InvalidParameter("relative support must lie in (0, 1]")
    return max(1, math.ceil(fraction * n_transactions - 1e-9))


def association_rules(itemsets: Sequence[FrequentItemset], transactions: Sequence,
                      min_confidence: float) -> list[AssociationRule]:
    """Rules ``X -> Y`` over the frequent itemsets with confidence >= threshold.

    Supports of antecedents are looked up in ``itemsets``; downward closure
    guarantees they are present when the itemsets were mined from
    ``transactions``, which are only scanned for any missing subset.
    """
    if not 0.0 < min_confidence <= 1.0:
        raise InvalidParameter("min_confidence must lie in (0, 1]")
    support = {frozenset(f.items): f.support for f in itemsets}
    sets = None

    def sup(s):
        nonlocal sets
        v = support.get(s)
        if v is None:
            if sets is None:
                sets = list(_item_sets(transactions))
            v = support[s] = sum(1 for t in sets if s <= t)
        return v

    rules = []
    for f in itemsets:
        if len(f.items) < 2:
            continue
        whole = frozenset(f.items)
        for r in range(1, len(f.items)):
            for ante in combinations(f.items, r):
                conf = f.support / sup(frozenset(ante))
                if conf >= min_confidence - 1e-12:
                    cons = tuple(sorted(whole.difference(ante)))
                    rules.append(AssociationRule(ante, cons, f.support, conf))
    rules.sort(key=lambda r: (-r.confidence, -r.support, _sort_key(r.antecedent), _sort_key(r.consequent)))
    return rules


def suggest_premises(rules: Sequence[AssociationRule], partial_items: Iterable[str], k: int = 10) -> list[str]:
    """Rank items implied by rules whose antecedent is already known.

    An item scores the best confidence of any applicable rule naming it
    (support of that rule breaks ties, then item id).
    """
    if k < 1:
        raise InvalidParameter("k must be >= 1")
    have = set(partial_items)
    best: dict[str, tuple[float, int]] = {}
    for r in rules:
        if not set(r.antecedent) <= have:
            continue
        for it in r.consequent:
            if it in have:
                continue
            score = (r.confidence, r.support)
            if it not in best or score > best[it]:
                best[it] = score
    ranked = sorted(best, key=lambda it: (-best[it][0], -best[it][1], it))
    return ranked[:k]
