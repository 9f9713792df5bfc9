"""Corpus statistics, CSV emitters and graph serialisation.

Snapshot format (little-endian), version 1::

    offset  size   field
    0       8      magic  b"DEPNETSN"
    8       4      uint32 format version (1)
    12      8      uint64 node count N
    20      8      uint64 edge count E
    28      8      uint64 byte length L of the string block
    36      L      UTF-8 string block: N ids then N names, each followed by "\n"
    ...     N      uint8  entity kind codes (order of EntityKind)
    ...     4N     int32  parent position, -1 for none
    ...     4E     uint32 edge source position
    ...     4E     uint32 edge target position
    ...     E      uint8  edge kind codes (order of EdgeKind)

Edges are stored in the graph's canonical ``(src, dst, kind)`` order, so
writing the same graph twice yields identical bytes.
"""

from __future__ import annotations

import csv
import io
import os
import struct
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .degree import DegreeDistribution
from .errors import BadRow, IoError
from .graph import EDGE_KINDS, ENTITY_KINDS, DependencyGraph, EntityKind
from .mining import AssociationRule

SNAPSHOT_MAGIC = b"DEPNETSN"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<8sIQQQ")

THEORY_EXTENSION = ".thy"


@dataclass(frozen=True)
class StatsReport:
    nodes_by_kind: dict[EntityKind, int]
    edge_count: int
    entries: int
    lemmas: int
    loc: int | None = None

    @property
    def node_count(self):
        return sum(self.nodes_by_kind.values())

    def to_dict(self):
        return {
            "nodes": self.node_count,
            "nodes_by_kind": {k.value: v for k, v in self.nodes_by_kind.items()},
            "edges": self.edge_count,
            "entries": self.entries,
            "lemmas": self.lemmas,
            "loc": self.loc,
        }


def count_lines(source_dir, extension: str = THEORY_EXTENSION) -> int:
    """Physical newline-terminated lines over all ``extension`` files below a directory."""
    root = Path(source_dir)
    if not root.is_dir():
        raise IoError(source_dir, "not a readable directory")
    total = 0
    try:
        for dirpath, _, files in os.walk(root, onerror=_raise_io):
            for f in sorted(files):
                if f.endswith(extension):
                    with open(os.path.join(dirpath, f), "rb") as fh:
                        for block in iter(lambda: fh.read(1 << 20), b""):
                            total += block.count(b"\n")
    except OSError as exc:
        raise IoError(getattr(exc, "filename", source_dir) or source_dir, exc.strerror or str(exc)) from None
    return total


def _raise_io(exc):
    raise exc


def corpus_stats(graph: DependencyGraph, source_dir=None) -> StatsReport:
    kinds = graph.kind_counts()
    return StatsReport(kinds, graph.edge_count, kinds[EntityKind.SESSION], kinds[EntityKind.FACT],
                       count_lines(source_dir) if source_dir is not None else None)


# -- CSV ----------------------------------------------------------------------

def _write(sink, text: str) -> int:
    data = text.encode("utf-8")
    if isinstance(sink, io.TextIOBase):
        sink.write(text)
    else:
        sink.write(data)
    return len(data)


def degree_csv(dist: DegreeDistribution, normalized: bool = False) -> str:
    lines = ["deg,pr" if normalized else "deg,count"]
    for d, c in sorted(dist.histogram.items()):
        lines.append(f"{d},{c / dist.n!r}" if normalized else f"{d},{c}")
    return "\n".join(lines) + "\n"


def emit_degree_csv(dist: DegreeDistribution, normalized: bool, sink) -> int:
    """Write the histogram as ``deg,count`` (or ``deg,pr``) CSV; returns bytes written."""
    try:
        return _write(sink, degree_csv(dist, normalized))
    except OSError as exc:
        raise IoError(getattr(sink, "name", "<sink>"), str(exc)) from None


def _fmt(v):
    return repr(v) if isinstance(v, float) else str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


METRICS_HEADER = ("id", "in_degree", "out_degree", "ego_nodes", "ego_edges",
                  "clustering", "betweenness", "centrality")


def metrics_csv(rows) -> str:
    return csv_text(METRICS_HEADER, ((m.node, m.in_degree, m.out_degree, m.ego_nodes, m.ego_edges,
                                      m.clustering, m.betweenness, m.centrality) for m in rows))


def recommendations_csv(recs) -> str:
    return csv_text(("entity", "declared", "suggested", "confidence"),
                    ((r.entity, r.declared_group, r.suggested_group, r.confidence) for r in recs))


def itemsets_csv(itemsets) -> str:
    return csv_text(("items", "support"), ((";".join(f.items), f.support) for f in itemsets))


def rules_csv(rules) -> str:
    return csv_text(("antecedent", "consequent", "support", "confidence"),
                    ((";".join(r.antecedent), ";".join(r.consequent), r.support, r.confidence)
                     for r in rules))


def read_rules_csv(path):
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["antecedent", "consequent", "support", "confidence"]:
            raise BadRow(1, "expected rules.csv header")
        for i, row in enumerate(reader, 2):
            if len(row) != 4:
                raise BadRow(i, "expected 4 columns")
            try:
                out.append(AssociationRule(tuple(row[0].split(";")), tuple(row[1].split(";")),
                                           int(row[2]), float(row[3])))
            except ValueError as exc:
                raise BadRow(i, str(exc)) from None
    return out


# -- files --------------------------------------------------------------------

@contextmanager
def atomic_open(path, mode="w"):
    """Write to a temporary sibling and rename over ``path`` on success."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    # mkstemp creates 0600; give the result ordinary umask permissions
    mask = os.umask(0)
    os.umask(mask)
    os.chmod(tmp, 0o666 & ~mask)
    try:
        with os.fdopen(fd, mode, **({} if "b" in mode else {"encoding": "utf-8", "newline": ""})) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_graph_tsv(graph: DependencyGraph, directory, chunk: int = 1_000_000) -> None:
    """Write ``nodes.tsv`` and ``edges.tsv`` into ``directory``."""
    os.makedirs(directory, exist_ok=True)
    ids = graph.ids
    names = graph.names()
    kinds = [k.value for k in ENTITY_KINDS]
    ekinds = [k.value for k in EDGE_KINDS]
    parents = graph.parents.tolist()
    codes = graph.kind_codes.tolist()
    for s in (*ids, *names):
        if "\t" in s or "\n" in s or "\r" in s:
            raise IoError(directory, f"field {s!r} contains a tab or newline")
    with atomic_open(os.path.join(directory, "nodes.tsv")) as fh:
        fh.write("id\tkind\tname\tparent\n")
        for start in range(0, len(ids), chunk):
            fh.write("".join(
                f"{ids[i]}\t{kinds[codes[i]]}\t{names[i]}\t{ids[parents[i]] if parents[i] >= 0 else ''}\n"
                for i in range(start, min(start + chunk, len(ids)))))
    with atomic_open(os.path.join(directory, "edges.tsv")) as fh:
        fh.write("src\tdst\tkind\n")
        for start in range(0, graph.edge_count, chunk):
            s = graph.src[start:start + chunk].tolist()
            d = graph.dst[start:start + chunk].tolist()
            k = graph.edge_codes[start:start + chunk].tolist()
            fh.write("".join(f"{ids[a]}\t{ids[b]}\t{ekinds[c]}\n" for a, b, c in zip(s, d, k)))


def write_snapshot(graph: DependencyGraph, path) -> None:
    ids, names = graph.ids, graph.names()
    for s in (*ids, *names):
        if "\n" in s:
            raise IoError(path, f"field {s!r} contains a newline")
    block = ("".join(s + "\n" for s in ids) + "".join(s + "\n" for s in names)).encode("utf-8")
    with atomic_open(path, "wb") as fh:
        fh.write(_HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, graph.node_count,
                              graph.edge_count, len(block)))
        fh.write(block)
        fh.write(graph.kind_codes.astype("<u1").tobytes())
        fh.write(graph.parents.astype("<i4").tobytes())
        fh.write(graph.src.astype("<u4").tobytes())
        fh.write(graph.dst.astype("<u4").tobytes())
        fh.write(graph.edge_codes.astype("<u1").tobytes())


def is_snapshot(path) -> bool:
    try:
        with open(path, "rb") as fh:
            return fh.read(8) == SNAPSHOT_MAGIC
    except OSError:
        return False


def read_snapshot(path) -> DependencyGraph:
    try:
        with open(path, "rb") as fh:
            head = fh.read(_HEADER.size)
            if len(head) < _HEADER.size:
                raise IoError(path, "truncated snapshot header")
            magic, version, n, e, blen = _HEADER.unpack(head)
            if magic != SNAPSHOT_MAGIC:
                raise IoError(path, "not a depnet snapshot")
            if version != SNAPSHOT_VERSION:
                raise IoError(path, f"unsupported snapshot version {version}")
            strings = fh.read(blen).decode("utf-8").split("\n")

            def arr(dtype, count):
                a = np.fromfile(fh, dtype=dtype, count=count)
                if len(a) != count:
                    raise IoError(path, "truncated snapshot")
                return a

            kinds = arr("<u1", n)
            parents = arr("<i4", n).astype(np.int64)
            src = arr("<u4", e).astype(np.int64)
            dst = arr("<u4", e).astype(np.int64)
            ekinds = arr("<u1", e)
    except OSError as exc:
        if isinstance(exc, IoError):
            raise
        raise IoError(path, exc.strerror or str(exc)) from None
    if len(strings) != 2 * n + 1:
        raise IoError(path, "corrupt string block")
    return DependencyGraph.from_arrays(strings[:n], kinds, src, dst, ekinds,
                                       names=strings[n:2 * n], parents=parents)
