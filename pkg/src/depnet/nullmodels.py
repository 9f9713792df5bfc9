"""Seeded random baselines: Erdos-Renyi digraphs, preferential attachment,
and discrete power-law samples.

All randomness comes from ``numpy.random.Generator`` over the PCG64 bit
generator seeded with ``numpy.random.SeedSequence(seed)``, i.e.
``numpy.random.default_rng(seed)``. Streams are therefore reproducible for a
given seed and numpy's documented PCG64 algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .graph import DependencyGraph, EdgeKind, EntityKind
from .zeta import DiscretePowerLaw


@dataclass(frozen=True)
class ErdosRenyi:
    n: int
    p: float


@dataclass(frozen=True)
class PreferentialAttachment:
    n: int
    m: int


@dataclass(frozen=True)
class GenSpec:
    model: ErdosRenyi | PreferentialAttachment
    seed: int

    def generate(self) -> DependencyGraph:
        if isinstance(self.model, ErdosRenyi):
            return erdos_renyi(self.model.n, self.model.p, self.seed)
        return preferential_attachment(self.model.n, self.model.m, self.seed)


def node_ids(n: int) -> list[str]:
    return [f"n{i}" for i in range(n)]


def _graph(n, src, dst):
    src = np.asarray(src, dtype=np.int64)
    return DependencyGraph.from_arrays(
        node_ids(n), np.full(n, EntityKind.OTHER.code, dtype=np.uint8), src,
        np.asarray(dst, dtype=np.int64), np.full(len(src), EdgeKind.USES.code, dtype=np.uint8))


def erdos_renyi(n: int, p: float, seed: int) -> DependencyGraph:
    """Directed G(n, p) without self-loops.

    The edge count is drawn from Binomial(n(n-1), p) and that many distinct
    ordered pairs are then chosen uniformly, which has the same law as
    flipping one coin per pair.
    """
    if n < 1 or not 0.0 <= p <= 1.0:
        raise InvalidParameter("need n >= 1 and 0 <= p <= 1")
    rng = np.random.default_rng(seed)
    pairs = n * (n - 1)
    m = int(rng.binomial(pairs, p)) if pairs else 0
    if m == 0:
        keys = np.zeros(0, dtype=np.int64)
    elif m > pairs // 4:
        keys = np.sort(rng.permutation(pairs)[:m])
    else:
        keys = np.unique(rng.integers(0, pairs, m))
        while len(keys) < m:
            extra = rng.integers(0, pairs, m - len(keys))
            keys = np.unique(np.concatenate([keys, extra]))
    src = keys // (n - 1) if n > 1 else keys
    r = keys - src * (n - 1)
    dst = r + (r >= src)
    return _graph(n, src, dst)


def preferential_attachment(n: int, m: int, seed: int) -> DependencyGraph:
    """Directed growth model with attachment weight ``in_degree + 1``.

    Nodes ``0..m`` start as a directed cycle. Every later node links to ``m``
    distinct earlier nodes; each target is drawn with probability
    proportional to its current in-degree plus one, redrawing duplicates.
    """
    if not 1 <= m < n:
        raise InvalidParameter("need 1 <= m < n")
    rng = np.random.default_rng(seed)
    seed_n = m + 1
    n_edges = seed_n + m * (n - seed_n)
    src = np.empty(n_edges, dtype=np.int64)
    dst = np.empty(n_edges, dtype=np.int64)
    # urn holds each node once (the +1) plus once per received edge
    urn = np.empty(n + n_edges, dtype=np.int64)
    size = 0
    for v in range(seed_n):
        urn[size] = v
        size += 1
    e = 0
    for v in range(seed_n):
        src[e], dst[e] = v, (v + 1) % seed_n
        e += 1
    urn[size:size + seed_n] = dst[:seed_n]
    size += seed_n
    buf = rng.random(4096)
    bi = 0
    for v in range(seed_n, n):
        chosen = []
        while len(chosen) < m:
            if bi == len(buf):
                buf = rng.random(4096)
                bi = 0
            t = int(urn[int(buf[bi] * size)])
            bi += 1
            if t not in chosen:
                chosen.append(t)
        for t in chosen:
            src[e], dst[e] = v, t
            e += 1
            urn[size] = t
            size += 1
        urn[size] = v
        size += 1
    return _graph(n, src, dst)


def power_law_sample(gamma: float, xmin: int, n: int, seed: int) -> np.ndarray:
    """``n`` i.i.d. draws from the discrete power law on ``k >= xmin``."""
    if not gamma > 1.0 or xmin < 1 or n < 1:
        raise InvalidParameter("need gamma > 1, xmin >= 1, n >= 1")
    return DiscretePowerLaw(gamma, xmin).sample(n, np.random.default_rng(seed))
