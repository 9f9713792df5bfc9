"""Typed dependency graph (a "general dependency network").

Edges point from the depender to the dependee: a lemma has an edge to every
fact it uses, a theory to every theory it imports. With this orientation the
in-degree of a node counts its users.

Graphs are assembled with :class:`GraphBuilder` and sealed into an immutable,
array-backed :class:`DependencyGraph`. Nodes keep their insertion order and
are addressed internally by position; all public methods take string ids.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import (DanglingParent, DuplicateId, EmptySelection,
                     InvalidParameter, SelfLoop, UnknownEndpoint, UnknownNode)


class EntityKind(str, enum.Enum):
    SESSION = "session"
    THEORY = "theory"
    FACT = "fact"
    CONSTANT = "constant"
    TYPECON = "type"
    OTHER = "other"

    @classmethod
    def parse(cls, text: str, lenient: bool = False) -> "EntityKind":
        try:
            return cls(text.strip().lower())
        except ValueError:
            if lenient:
                return cls.OTHER
            raise

    @property
    def code(self) -> int:
        return _ENTITY_CODES[self]

    @property
    def rank(self) -> int:
        # coarseness: sessions contain theories, theories contain the rest
        return {EntityKind.SESSION: 0, EntityKind.THEORY: 1}.get(self, 2)


class EdgeKind(str, enum.Enum):
    IMPORTS = "imports"
    USES = "uses"
    DEFINES = "defines"

    @classmethod
    def parse(cls, text: str) -> "EdgeKind":
        return cls(text.strip().lower())

    @property
    def code(self) -> int:
        return _EDGE_CODES[self]


class Direction(str, enum.Enum):
    IN = "in"
    OUT = "out"


ENTITY_KINDS = tuple(EntityKind)
EDGE_KINDS = tuple(EdgeKind)
_ENTITY_CODES = {k: i for i, k in enumerate(ENTITY_KINDS)}
_EDGE_CODES = {k: i for i, k in enumerate(EDGE_KINDS)}
_RANKS = np.array([k.rank for k in ENTITY_KINDS], dtype=np.int8)


@dataclass(frozen=True)
class Entity:
    id: str
    kind: EntityKind
    name: str = ""
    parent: str | None = None


@dataclass(frozen=True)
class DepEdge:
    src: str
    dst: str
    kind: EdgeKind = EdgeKind.USES


class GraphBuilder:
    """Single-writer accumulator for entities and edges.

    Duplicate edges collapse; self-loops are rejected immediately. Missing
    endpoints and parents are only reported by :meth:`seal`, so entities and
    edges may arrive in any order.
    """

    def __init__(self):
        self._entities: dict[str, Entity] = {}
        self._edges: dict[DepEdge, None] = {}
        self._sealed = False

    def _check_open(self):
        if self._sealed:
            raise InvalidParameter("builder already sealed")

    def add_entity(self, entity: Entity) -> "GraphBuilder":
        self._check_open()
        old = self._entities.get(entity.id)
        if old is not None and old != entity:
            raise DuplicateId(entity.id)
        self._entities[entity.id] = entity
        return self

    def add_edge(self, edge: DepEdge) -> "GraphBuilder":
        self._check_open()
        if edge.src == edge.dst:
            raise SelfLoop(edge.src)
        self._edges[edge] = None
        return self

    def __len__(self):
        return len(self._entities)

    def seal(self) -> "DependencyGraph":
        ents = list(self._entities.values())
        index = {e.id: i for i, e in enumerate(ents)}
        problems = []
        for e in self._edges:
            for end in (e.src, e.dst):
                if end not in index:
                    problems.append(("unknown-endpoint", end))
        parents = np.full(len(ents), -1, dtype=np.int64)
        for i, e in enumerate(ents):
            if e.parent is not None:
                j = index.get(e.parent)
                if j is None:
                    problems.append(("dangling-parent", e.id))
                else:
                    parents[i] = j
        if problems:
            _raise_problems(problems)
        edges = list(self._edges)
        graph = DependencyGraph.from_arrays(
            [e.id for e in ents],
            np.array([e.kind.code for e in ents], dtype=np.uint8),
            np.array([index[e.src] for e in edges], dtype=np.int64),
            np.array([index[e.dst] for e in edges], dtype=np.int64),
            np.array([e.kind.code for e in edges], dtype=np.uint8),
            names=[e.name for e in ents],
            parents=parents,
        )
        self._sealed = True
        return graph


def _raise_problems(problems):
    unknown = sorted({p[1] for p in problems if p[0] == "unknown-endpoint"})
    if unknown:
        raise UnknownEndpoint(f"unknown edge endpoint(s): {', '.join(unknown[:10])}"
                              + (" ..." if len(unknown) > 10 else ""), problems)
    bad = sorted({p[1] for p in problems})
    raise DanglingParent(f"invalid parent for: {', '.join(bad[:10])}"
                         + (" ..." if len(bad) > 10 else ""), problems)


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class DependencyGraph:
    """Immutable typed digraph backed by numpy arrays.

    Edges are stored sorted by ``(src, dst, kind)``; ``in_order`` permutes
    them into destination order so both adjacency directions are CSR slices.
    """

    def __init__(self, ids, kind_codes, names, parents, src, dst, edge_codes):
        # trusted constructor; use from_arrays or GraphBuilder.seal
        self._ids = list(ids)
        self._names = names
        self._index: dict[str, int] | None = None
        n = len(self._ids)
        self.kind_codes = _readonly(kind_codes.astype(np.uint8, copy=False))
        self.parents = _readonly(parents)
        self.src = _readonly(src)
        self.dst = _readonly(dst)
        self.edge_codes = _readonly(edge_codes.astype(np.uint8, copy=False))
        self.out_indptr = _readonly(_indptr(self.src, n))
        self.in_order = _readonly(np.argsort(self.dst, kind="stable"))
        self.in_indptr = _readonly(_indptr(self.dst[self.in_order], n))

    @classmethod
    def from_arrays(cls, ids, kind_codes, src, dst, edge_codes, names=None, parents=None):
        """Validate raw index arrays and build a sealed graph.

        ``src``/``dst`` are positions into ``ids``. Duplicate edge triples are
        collapsed here.
        """
        ids = list(ids)
        n = len(ids)
        if len(set(ids)) != n:
            seen = set()
            for i in ids:
                if i in seen:
                    raise DuplicateId(i)
                seen.add(i)
        kind_codes = np.asarray(kind_codes, dtype=np.uint8)
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        edge_codes = np.asarray(edge_codes, dtype=np.uint8)
        if not (len(kind_codes) == n and len(src) == len(dst) == len(edge_codes)):
            raise InvalidParameter("array lengths disagree")
        if len(kind_codes) and kind_codes.max() >= len(ENTITY_KINDS):
            raise InvalidParameter("entity kind code out of range")
        if len(edge_codes) and edge_codes.max() >= len(EDGE_KINDS):
            raise InvalidParameter("edge kind code out of range")
        if len(src):
            lo = min(src.min(), dst.min())
            hi = max(src.max(), dst.max())
            if lo < 0 or hi >= n:
                raise InvalidParameter("edge endpoint index out of range")
            loops = np.flatnonzero(src == dst)
            if len(loops):
                raise SelfLoop(ids[src[loops[0]]])
        if parents is None:
            parents = np.full(n, -1, dtype=np.int64)
        else:
            parents = np.asarray(parents, dtype=np.int64)
            has = np.flatnonzero(parents >= 0)
            if len(has):
                if parents.max() >= n:
                    raise InvalidParameter("parent index out of range")
                bad = has[_RANKS[kind_codes[parents[has]]] >= _RANKS[kind_codes[has]]]
                if len(bad):
                    raise DanglingParent(
                        f"parent of {ids[bad[0]]!r} is not of a coarser kind",
                        [("bad-parent-kind", ids[i]) for i in bad])
        if names is None:
            names = [""] * n
        src, dst, edge_codes = _collapse(src, dst, edge_codes, n)
        return cls(ids, kind_codes, list(names), parents, src, dst, edge_codes)

    # -- basic queries ----------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self._ids)

    @property
    def edge_count(self) -> int:
        return len(self.src)

    @property
    def ids(self) -> list[str]:
        return list(self._ids)

    def index_of(self, node: str) -> int:
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self._ids)}
        try:
            return self._index[node]
        except KeyError:
            raise UnknownNode(node) from None

    def __contains__(self, node) -> bool:
        try:
            self.index_of(node)
        except UnknownNode:
            return False
        return True

    def __len__(self):
        return self.node_count

    def kind(self, node: str) -> EntityKind:
        return ENTITY_KINDS[self.kind_codes[self.index_of(node)]]

    def entity(self, node: str) -> Entity:
        return self._entity_at(self.index_of(node))

    def _entity_at(self, i: int) -> Entity:
        p = int(self.parents[i])
        return Entity(self._ids[i], ENTITY_KINDS[self.kind_codes[i]], self._names[i],
                      self._ids[p] if p >= 0 else None)

    def entities(self) -> Iterator[Entity]:
        for i in range(self.node_count):
            yield self._entity_at(i)

    def edges(self) -> Iterator[DepEdge]:
        ids = self._ids
        for s, d, k in zip(self.src.tolist(), self.dst.tolist(), self.edge_codes.tolist()):
            yield DepEdge(ids[s], ids[d], EDGE_KINDS[k])

    def successors(self, node: str) -> list[str]:
        """Distinct dependees of ``node``."""
        i = self.index_of(node)
        out = self.dst[self.out_indptr[i]:self.out_indptr[i + 1]]
        return [self._ids[j] for j in dict.fromkeys(out.tolist())]

    def predecessors(self, node: str) -> list[str]:
        """Distinct dependers of ``node``."""
        i = self.index_of(node)
        e = self.in_order[self.in_indptr[i]:self.in_indptr[i + 1]]
        return [self._ids[j] for j in dict.fromkeys(self.src[e].tolist())]

    def degree(self, node: str, direction: Direction | str) -> int:
        i = self.index_of(node)
        ptr = self.in_indptr if Direction(direction) is Direction.IN else self.out_indptr
        return int(ptr[i + 1] - ptr[i])

    def degrees(self, direction: Direction | str) -> np.ndarray:
        ptr = self.in_indptr if Direction(direction) is Direction.IN else self.out_indptr
        return np.diff(ptr)

    def kind_counts(self) -> dict[EntityKind, int]:
        c = np.bincount(self.kind_codes, minlength=len(ENTITY_KINDS))
        return {k: int(c[k.code]) for k in ENTITY_KINDS}

    def edge_kind_counts(self) -> dict[EdgeKind, int]:
        c = np.bincount(self.edge_codes, minlength=len(EDGE_KINDS))
        return {k: int(c[k.code]) for k in EDGE_KINDS}

    def names(self) -> list[str]:
        return list(self._names)

    # -- derived graphs ---------------------------------------------------

    def induced_subgraph(self, node_kinds: Iterable[EntityKind],
                         edge_kinds: Iterable[EdgeKind]) -> "DependencyGraph":
        """Keep nodes of ``node_kinds`` and edges of ``edge_kinds`` between them.

        Parent links pointing at dropped nodes are cleared.
        """
        node_kinds = {EntityKind(k) for k in node_kinds}
        edge_kinds = {EdgeKind(k) for k in edge_kinds}
        if not node_kinds or not edge_kinds:
            raise EmptySelection("kind selection must be non-empty")
        keep = np.isin(self.kind_codes, [k.code for k in node_kinds])
        emask = keep[self.src] & keep[self.dst] & np.isin(self.edge_codes, [k.code for k in edge_kinds])
        remap = np.full(self.node_count, -1, dtype=np.int64)
        kept = np.flatnonzero(keep)
        remap[kept] = np.arange(len(kept))
        parents = self.parents[kept]
        parents = np.where(parents >= 0, remap[np.maximum(parents, 0)], -1)
        return DependencyGraph(
            [self._ids[i] for i in kept], self.kind_codes[kept],
            [self._names[i] for i in kept], parents,
            remap[self.src[emask]], remap[self.dst[emask]], self.edge_codes[emask])

    def undirected_projection(self) -> "UndirectedGraph":
        n = self.node_count
        lo = np.minimum(self.src, self.dst)
        hi = np.maximum(self.src, self.dst)
        keys, counts = np.unique(lo * n + hi, return_counts=True)
        return UndirectedGraph(self._ids, keys // max(n, 1), keys % max(n, 1), counts)

    # -- equality -----------------------------------------------------------

    def _canonical(self):
        ents = frozenset(self.entities())
        ids = self._ids
        edges = frozenset(zip((ids[i] for i in self.src.tolist()),
                              (ids[i] for i in self.dst.tolist()),
                              self.edge_codes.tolist()))
        return ents, edges

    def __eq__(self, other):
        if not isinstance(other, DependencyGraph):
            return NotImplemented
        if (self.node_count, self.edge_count) != (other.node_count, other.edge_count):
            return False
        return self._canonical() == other._canonical()

    __hash__ = None

    def __repr__(self):
        return f"DependencyGraph(nodes={self.node_count}, edges={self.edge_count})"


def _indptr(sorted_keys, n):
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(sorted_keys, minlength=n), out=ptr[1:])
    return ptr


def _collapse(src, dst, codes, n):
    if len(src) == 0:
        return src, dst, codes
    nk = len(EDGE_KINDS)
    key = (src * n + dst) * nk + codes
    key = np.unique(key)
    codes = (key % nk).astype(np.uint8)
    pair = key // nk
    return pair // n, pair % n, codes


class UndirectedGraph:
    """Weighted simple undirected graph over a fixed node list.

    ``u``/``v`` hold node positions with ``u < v``; parallel entries passed to
    the constructor are summed.
    """

    def __init__(self, nodes, u, v, weight):
        self.nodes = list(nodes)
        n = len(self.nodes)
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.asarray(weight, dtype=np.float64)
        if np.any(u == v):
            raise SelfLoop(self.nodes[int(u[np.argmax(u == v)])])
        if np.any(w < 1):
            raise InvalidParameter("edge weights must be >= 1")
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        keys, inv = np.unique(lo * n + hi, return_inverse=True)
        self.u = keys // max(n, 1)
        self.v = keys % max(n, 1)
        self.weight = np.bincount(inv.ravel(), weights=w, minlength=len(keys)) if len(keys) else w[:0]
        self._adj = None
        self._index = None

    @classmethod
    def from_edges(cls, nodes, edges):
        """Build from ``(a, b)`` or ``(a, b, weight)`` tuples of node ids."""
        nodes = list(nodes)
        index = {x: i for i, x in enumerate(nodes)}
        u, v, w = [], [], []
        for e in edges:
            u.append(index[e[0]])
            v.append(index[e[1]])
            w.append(e[2] if len(e) > 2 else 1)
        return cls(nodes, u, v, w)

    @property
    def node_count(self):
        return len(self.nodes)

    @property
    def edge_count(self):
        return len(self.u)

    @property
    def total_weight(self) -> float:
        return float(self.weight.sum())

    def index_of(self, node):
        if self._index is None:
            self._index = {x: i for i, x in enumerate(self.nodes)}
        try:
            return self._index[node]
        except KeyError:
            raise UnknownNode(node) from None

    def adjacency(self) -> list[dict[int, float]]:
        """Per-position neighbor -> weight maps (cached)."""
        if self._adj is None:
            adj = [dict() for _ in range(self.node_count)]
            for a, b, w in zip(self.u.tolist(), self.v.tolist(), self.weight.tolist()):
                adj[a][b] = w
                adj[b][a] = w
            self._adj = adj
        return self._adj

    def neighbors(self, node) -> list:
        return [self.nodes[j] for j in self.adjacency()[self.index_of(node)]]

    def edge_set(self):
        return {(frozenset((self.nodes[a], self.nodes[b])), w)
                for a, b, w in zip(self.u.tolist(), self.v.tolist(), self.weight.tolist())}

    def __repr__(self):
        return f"UndirectedGraph(nodes={self.node_count}, edges={self.edge_count})"
