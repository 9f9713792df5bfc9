"""Per-node network metrics.

Clustering, ego statistics and betweenness are computed on the undirected
projection with unit edge lengths; centrality runs on the directed graph so
that score flows from a depender to what it depends on.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .graph import DependencyGraph, UndirectedGraph


@dataclass(frozen=True)
class Exact:
    pass


@dataclass(frozen=True)
class Sampled:
    k: int
    seed: int = 0


EXACT = Exact()


def parse_betweenness_mode(text: str, seed: int = 0):
    """``"exact"`` or ``"sampled:K"``."""
    if text == "exact":
        return EXACT
    if text.startswith("sampled:"):
        try:
            k = int(text.split(":", 1)[1])
        except ValueError:
            raise InvalidParameter(f"bad betweenness mode {text!r}") from None
        return Sampled(k, seed)
    raise InvalidParameter(f"bad betweenness mode {text!r}")


@dataclass(frozen=True)
class NodeMetrics:
    node: str
    in_degree: int
    out_degree: int
    ego_nodes: int
    ego_edges: int
    clustering: float
    betweenness: float
    centrality: float


def _neighbor_sets(ug: UndirectedGraph):
    return [set(a) for a in ug.adjacency()]


def _closed_pairs(nbrs, i):
    mine = nbrs[i]
    return sum(len(mine & nbrs[j]) for j in mine) // 2


def local_clustering(ug: UndirectedGraph, node) -> float:
    """Fraction of neighbor pairs that are themselves adjacent (0 below degree 2)."""
    i = ug.index_of(node)
    nbrs = _neighbor_sets(ug)
    k = len(nbrs[i])
    if k < 2:
        return 0.0
    return _closed_pairs(nbrs, i) / (k * (k - 1) / 2)


def _brandes_source(adj, s, cb):
    n = len(adj)
    sigma = [0] * n
    dist = [-1] * n
    preds = [[] for _ in range(n)]
    sigma[s] = 1
    dist[s] = 0
    order = []
    q = deque([s])
    while q:
        v = q.popleft()
        order.append(v)
        dv = dist[v] + 1
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dv
                q.append(w)
            if dist[w] == dv:
                sigma[w] += sigma[v]
                preds[w].append(v)
    delta = [0.0] * n
    for w in reversed(order):
        coeff = (1.0 + delta[w]) / sigma[w]
        for v in preds[w]:
            delta[v] += sigma[v] * coeff
        if w != s:
            cb[w] += delta[w]


def betweenness(ug: UndirectedGraph, mode=EXACT) -> dict:
    """Unnormalised shortest-path betweenness (Brandes).

    ``Sampled(k, seed)`` accumulates from ``k`` sources drawn without
    replacement and rescales by ``n / k``; sources are processed in
    ascending order, so ``k = n`` reproduces the exact result bit for bit.
    """
    n = ug.node_count
    adj = [list(a) for a in ug.adjacency()]
    if isinstance(mode, Sampled):
        if mode.k < 1:
            raise InvalidParameter("sample size k must be >= 1")
        k = min(mode.k, n)
        sources = np.sort(np.random.default_rng(mode.seed).choice(n, k, replace=False)).tolist() if n else []
        scale = n / k if k else 1.0
    elif isinstance(mode, Exact):
        sources = range(n)
        scale = 1.0
    else:
        raise InvalidParameter(f"unknown betweenness mode {mode!r}")
    cb = [0.0] * n
    for s in sources:
        _brandes_source(adj, s, cb)
    # each unordered pair was counted from both ends
    return {ug.nodes[i]: cb[i] * scale / 2.0 for i in range(n)}


def centrality(graph: DependencyGraph, damping: float = 0.85,
               tolerance: float = 1e-12, max_iter: int = 10_000) -> dict:
    """Damped PageRank where each edge passes score from depender to dependee.

    Nodes without dependencies spread their score uniformly.
    """
    if not 0.0 < damping < 1.0:
        raise InvalidParameter("damping must lie in (0, 1)")
    if not tolerance > 0.0:
        raise InvalidParameter("tolerance must be > 0")
    n = graph.node_count
    if n == 0:
        return {}
    out_deg = np.diff(graph.out_indptr).astype(np.float64)
    dangling = out_deg == 0
    w = 1.0 / out_deg[graph.src] if graph.edge_count else np.zeros(0)
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        flow = np.bincount(graph.dst, weights=x[graph.src] * w, minlength=n)
        new = (1.0 - damping) / n + damping * (flow + x[dangling].sum() / n)
        new /= new.sum()
        change = np.abs(new - x).sum()
        x = new
        if change < tolerance:
            break
    return dict(zip(graph.ids, x.tolist()))


def compute_node_metrics(graph: DependencyGraph, betweenness_mode=EXACT,
                         damping: float = 0.85) -> list[NodeMetrics]:
    ug = graph.undirected_projection()
    nbrs = _neighbor_sets(ug)
    bc = betweenness(ug, betweenness_mode)
    pr = centrality(graph, damping)
    indeg = graph.degrees("in")
    outdeg = graph.degrees("out")
    rows = []
    for i, node in enumerate(graph.ids):
        k = len(nbrs[i])
        closed = _closed_pairs(nbrs, i)
        rows.append(NodeMetrics(
            node, int(indeg[i]), int(outdeg[i]), k + 1, k + closed,
            closed / (k * (k - 1) / 2) if k >= 2 else 0.0,
            bc[node], pr[node]))
    return rows
