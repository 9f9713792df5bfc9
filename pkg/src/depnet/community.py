"""Modularity-based community detection and comparison with declared structure.

The detector is a deterministic Louvain variant: nodes are visited in id
order, each moves to the neighboring community with the largest modularity
gain (staying put wins ties, then the smallest community id), and the
graph is collapsed onto its communities until a level brings no gain.
On small graphs the result is then fine-tuned with Kernighan-Lin style
passes, which can climb out of the greedy local optimum.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from math import comb
from typing import Hashable, Mapping

import numpy as np

from .errors import EmptyGraph, IncompletePartition, InvalidParameter, NodeSetMismatch
from .graph import DependencyGraph, EdgeKind, EntityKind, UndirectedGraph

MIN_GAIN = 1e-9
FINE_TUNE_LIMIT = 500
UNASSIGNED = "(none)"


@dataclass(frozen=True)
class Partition:
    """Dense community assignment ``node -> 0..k-1``.

    ``labels[c]`` names community ``c`` when the partition comes from declared
    structure (a session or theory id).
    """

    assignment: Mapping[str, int]
    labels: tuple[str, ...] | None = None

    @classmethod
    def from_labels(cls, mapping: Mapping[str, Hashable], keep_labels: bool = True) -> "Partition":
        """Renumber arbitrary labels densely, in order of the smallest member id."""
        dense: dict[Hashable, int] = {}
        out = {}
        for node in sorted(mapping):
            lab = mapping[node]
            if lab not in dense:
                dense[lab] = len(dense)
            out[node] = dense[lab]
        labels = tuple(str(lab) for lab in dense) if keep_labels else None
        return cls(out, labels)

    @classmethod
    def from_groups(cls, groups) -> "Partition":
        return cls.from_labels({v: i for i, g in enumerate(groups) for v in g}, keep_labels=False)

    @property
    def n_communities(self) -> int:
        return len(set(self.assignment.values()))

    def label(self, community: int) -> str:
        return self.labels[community] if self.labels is not None else str(community)

    def group_of(self, node) -> str:
        return self.label(self.assignment[node])

    def groups(self) -> list[list[str]]:
        out = defaultdict(list)
        for node in sorted(self.assignment):
            out[self.assignment[node]].append(node)
        return [out[c] for c in sorted(out)]

    def __len__(self):
        return len(self.assignment)


def modularity(ug: UndirectedGraph, partition: Partition) -> float:
    """Newman modularity of a partition of a weighted undirected graph."""
    if ug.node_count == 0:
        raise EmptyGraph("graph has no nodes")
    missing = [v for v in ug.nodes if v not in partition.assignment]
    if missing:
        raise IncompletePartition(f"{len(missing)} node(s) unassigned, e.g. {missing[0]!r}")
    w = ug.total_weight
    if w <= 0:
        raise EmptyGraph("graph has no edges")
    comm = np.array([partition.assignment[v] for v in ug.nodes], dtype=np.int64)
    k = max(int(comm.max()) + 1, 1)
    cu, cv = comm[ug.u], comm[ug.v]
    inside = np.bincount(cu[cu == cv], weights=ug.weight[cu == cv], minlength=k)
    deg = np.bincount(np.concatenate([cu, cv]), weights=np.concatenate([ug.weight, ug.weight]),
                      minlength=k)
    return float(np.sum(inside / w - (deg / (2.0 * w)) ** 2))


def _one_level(adj, loops, order, m2):
    """Local-move phase on a weighted graph; returns community per node."""
    n = len(adj)
    k = [loops[i] + sum(adj[i].values()) for i in range(n)]
    comm = list(range(n))
    tot = list(k)
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in order:
            ci = comm[i]
            links = defaultdict(float)
            for j, w in adj[i].items():
                links[comm[j]] += w
            tot[ci] -= k[i]
            ki = k[i]
            best_c = ci
            best_gain = links.get(ci, 0.0) - tot[ci] * ki / m2
            for c in sorted(links):
                if c == ci:
                    continue
                gain = links[c] - tot[c] * ki / m2
                if gain > best_gain + MIN_GAIN * m2 / 2:
                    best_c, best_gain = c, gain
            tot[best_c] += ki
            if best_c != ci:
                comm[i] = best_c
                improved = True
                moved_any = True
    return comm, moved_any


def _fine_tune(adj, order, part, m2):
    """Kernighan-Lin passes over single-node moves.

    Each pass moves every node exactly once, always taking the best
    available move (to a neighboring community or a fresh one) even when it
    lowers modularity, and keeps the best state seen. Passes repeat while
    they improve. Cost is quadratic in the node count per pass.
    """
    n = len(adj)
    k = [sum(a.values()) for a in adj]
    part = list(part)
    while True:
        tot = defaultdict(float)
        for i in range(n):
            tot[part[i]] += k[i]
        cur = list(part)
        fresh = max(cur) + 1
        moved = [False] * n
        q_delta = best_delta = 0.0
        best_state = None
        for _ in range(n):
            cand = None
            for i in order:
                if moved[i]:
                    continue
                a = cur[i]
                links = defaultdict(float)
                for j, w in adj[i].items():
                    links[cur[j]] += w
                stay = links.get(a, 0.0) - (tot[a] - k[i]) * k[i] / m2
                targets = sorted(c for c in links if c != a)
                if tot[a] > k[i]:
                    targets.append(fresh)
                for c in targets:
                    d = links.get(c, 0.0) - tot.get(c, 0.0) * k[i] / m2 - stay
                    if cand is None or d > cand[0]:
                        cand = (d, i, c)
            if cand is None:
                break
            d, i, c = cand
            tot[cur[i]] -= k[i]
            tot[c] += k[i]
            cur[i] = c
            moved[i] = True
            if c == fresh:
                fresh += 1
            q_delta += 2.0 * d / m2
            if q_delta > best_delta + MIN_GAIN:
                best_delta, best_state = q_delta, list(cur)
        if best_state is None:
            return part
        part = best_state


def detect_communities(ug: UndirectedGraph, seed: int = 0, randomize: bool = False,
                       refine: bool | None = None) -> Partition:
    """Louvain-style modularity maximisation.

    Deterministic by default. With ``randomize=True`` the first-level scan
    order is a permutation drawn from ``seed`` instead of id order.
    ``refine`` switches the Kernighan-Lin fine-tuning on or off; by default
    it runs on graphs with at most ``FINE_TUNE_LIMIT`` nodes.
    """
    if ug.node_count == 0 or ug.total_weight <= 0:
        raise EmptyGraph("graph has no edges")
    n = ug.node_count
    adj = [dict(a) for a in ug.adjacency()]
    loops = [0.0] * n
    m2 = 2.0 * ug.total_weight
    order = sorted(range(n), key=lambda i: ug.nodes[i])
    if randomize:
        order = np.random.default_rng(seed).permutation(order).tolist()
    first_order = order
    member = list(range(n))  # original node -> current super-node
    prev_q = None
    while True:
        comm, moved = _one_level(adj, loops, order, m2)
        if not moved:
            break
        # renumber by first appearance in scan order
        dense = {}
        for i in order:
            dense.setdefault(comm[i], len(dense))
        member = [dense[comm[s]] for s in member]
        q = modularity(ug, Partition(dict(zip(ug.nodes, member))))
        if prev_q is not None and q - prev_q < MIN_GAIN:
            break
        prev_q = q
        nn = len(dense)
        new_adj = [defaultdict(float) for _ in range(nn)]
        new_loops = [0.0] * nn
        for i in range(len(adj)):
            ci = dense[comm[i]]
            new_loops[ci] += loops[i]
            for j, w in adj[i].items():
                cj = dense[comm[j]]
                if ci == cj:
                    new_loops[ci] += w  # both directions visited: counts 2x internal weight
                else:
                    new_adj[ci][cj] += w
        adj = [dict(a) for a in new_adj]
        loops = new_loops
        order = list(range(nn))
    if refine is None:
        refine = n <= FINE_TUNE_LIMIT
    if refine:
        member = _fine_tune(ug.adjacency(), first_order, member, m2)
    return Partition.from_labels(dict(zip(ug.nodes, member)), keep_labels=False)


def compare_partitions(a: Partition, b: Partition) -> float:
    """Adjusted Rand index between two partitions of the same node set."""
    if set(a.assignment) != set(b.assignment):
        raise NodeSetMismatch("partitions cover different nodes")
    n = len(a.assignment)
    pairs = Counter((a.assignment[v], b.assignment[v]) for v in a.assignment)
    index = sum(comb(c, 2) for c in pairs.values())
    sa = sum(comb(c, 2) for c in Counter(a.assignment.values()).values())
    sb = sum(comb(c, 2) for c in Counter(b.assignment.values()).values())
    total = comb(n, 2)
    if total == 0:
        return 1.0
    expected = sa * sb / total
    top = (sa + sb) / 2.0
    if top == expected:
        return 1.0
    return (index - expected) / (top - expected)


@dataclass(frozen=True)
class RefactoringRecommendation:
    entity: str
    declared_group: str
    suggested_group: str
    confidence: float


def recommend_refactorings(graph: DependencyGraph | UndirectedGraph, declared: Partition,
                           predicted: Partition,
                           min_confidence: float = 0.5) -> list[RefactoringRecommendation]:
    """Suggest moving entities whose community mostly lives in another group.

    Each predicted community is mapped to its majority declared group (ties
    to the smaller label). ``confidence`` is the share of the community in
    that group.
    """
    if not 0.0 < min_confidence <= 1.0:
        raise InvalidParameter("min_confidence must lie in (0, 1]")
    nodes = set(graph.ids if isinstance(graph, DependencyGraph) else graph.nodes)
    if set(declared.assignment) != nodes or set(predicted.assignment) != nodes:
        raise NodeSetMismatch("partitions must cover exactly the graph's nodes")
    members = defaultdict(list)
    for v, c in predicted.assignment.items():
        members[c].append(v)
    recs = []
    for c, vs in members.items():
        counts = Counter(declared.group_of(v) for v in vs)
        top, hits = min(counts.items(), key=lambda t: (-t[1], t[0]))
        if top == UNASSIGNED:
            continue
        conf = hits / len(vs)
        if conf < min_confidence:
            continue
        for v in vs:
            g = declared.group_of(v)
            if g != top:
                recs.append(RefactoringRecommendation(v, g, top, conf))
    recs.sort(key=lambda r: (-r.confidence, r.entity))
    return recs


_LEVELS = {
    "session": (EntityKind.SESSION, {EntityKind.THEORY}),
    "theory": (EntityKind.THEORY, {EntityKind.FACT, EntityKind.CONSTANT,
                                   EntityKind.TYPECON, EntityKind.OTHER}),
}


def declared_partition(graph: DependencyGraph, level: str = "session") -> Partition:
    """Group every node by its ancestor of kind ``level`` (session or theory).

    A node of that kind is its own group; nodes without such an ancestor go
    to the ``"(none)"`` group.
    """
    if level not in _LEVELS:
        raise InvalidParameter(f"level must be one of {sorted(_LEVELS)}")
    target = _LEVELS[level][0].code
    parents = graph.parents
    kinds = graph.kind_codes
    ids = graph.ids
    out = {}
    for i in range(graph.node_count):
        j = i
        while j >= 0 and kinds[j] != target:
            j = int(parents[j])
        out[ids[i]] = ids[j] if j >= 0 else UNASSIGNED
    return Partition.from_labels(out)


def level_view(graph: DependencyGraph, level: str = "session"):
    """The member graph to cluster at ``level`` and its declared partition.

    Session level clusters theories; theory level clusters facts, constants
    and types.
    """
    if level not in _LEVELS:
        raise InvalidParameter(f"level must be one of {sorted(_LEVELS)}")
    declared_all = declared_partition(graph, level)
    sub = graph.induced_subgraph(_LEVELS[level][1], set(EdgeKind))
    declared = Partition.from_labels({v: declared_all.group_of(v) for v in sub.ids})
    return sub, declared
