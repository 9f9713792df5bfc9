"""Readers for corpus exports and theory headers.

Two table formats are accepted, chosen by file extension:

``*.tsv``
    nodes: ``id<TAB>kind<TAB>name<TAB>parent`` (parent may be empty);
    edges: ``src<TAB>dst<TAB>kind``. First line is the header.
``*.jsonl``
    one JSON object per line with the same keys.

Validation is layered: the row parsers only check row shape and kind names,
graph invariants (self-loops, dangling endpoints) are checked when the graph
is built.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import re
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np
import pandas as pd

from .errors import (BadRow, DanglingParent, DuplicateId, IoError, MissingBegin, ParseError,
                     SelfLoop, UnknownEdgeKind, UnknownEndpoint)
from .graph import (ENTITY_KINDS, DepEdge, DependencyGraph, EdgeKind, Entity,
                    EntityKind, GraphBuilder)

log = logging.getLogger(__name__)

NODE_COLUMNS = ("id", "kind", "name", "parent")
EDGE_COLUMNS = ("src", "dst", "kind")

_BULK_CHUNK = 2_000_000


@dataclass
class IngestReport:
    """Counts of rows dropped or rewritten in lenient mode."""
    dropped_edges: int = 0
    dropped_self_loops: int = 0
    cleared_parents: int = 0
    unknown_kinds: int = 0
    duplicate_ids: int = 0
    messages: list[str] = field(default_factory=list)

    @property
    def warning_count(self) -> int:
        return (self.dropped_edges + self.dropped_self_loops + self.cleared_parents
                + self.unknown_kinds + self.duplicate_ids)

    def warn(self, msg):
        log.warning(msg)
        if len(self.messages) < 100:
            self.messages.append(msg)


def _lines(stream):
    for line_no, raw in enumerate(stream, 1):
        # only spaces and line terminators: trailing tabs may delimit an empty column
        yield line_no, raw.rstrip("\r\n").rstrip(" ")


def _check_header(line_no, line, expected):
    cols = [c.strip().lower() for c in line.split("\t")]
    if tuple(cols[:len(expected)]) != expected[:len(cols)] or len(cols) < len(expected) - 1:
        raise BadRow(line_no, f"expected header {chr(9).join(expected)!r}")


def parse_nodes(stream: TextIO, lenient: bool = False,
                report: IngestReport | None = None) -> list[Entity]:
    """Parse a nodes table into entities.

    In lenient mode unknown kinds become ``EntityKind.OTHER``.
    """
    out = []
    header_seen = False
    for line_no, line in _lines(stream):
        if not line.strip():
            continue
        if not header_seen:
            _check_header(line_no, line, NODE_COLUMNS)
            header_seen = True
            continue
        cols = line.split("\t")
        if len(cols) == 3:
            cols.append("")
        if len(cols) != 4:
            raise BadRow(line_no, f"expected 4 columns, got {len(cols)}")
        eid, kind, name, parent = cols
        if not eid:
            raise BadRow(line_no, "empty id")
        try:
            k = EntityKind.parse(kind)
        except ValueError:
            if not lenient:
                raise BadRow(line_no, f"unknown entity kind {kind!r}") from None
            k = EntityKind.OTHER
            if report is not None:
                report.unknown_kinds += 1
        out.append(Entity(eid, k, name, parent.strip() or None))
    return out


def parse_edges(stream: TextIO, lenient: bool = False,
                report: IngestReport | None = None) -> list[DepEdge]:
    """Parse an edges table. Unknown edge kinds are skipped in lenient mode."""
    out = []
    header_seen = False
    for line_no, line in _lines(stream):
        if not line.strip():
            continue
        if not header_seen:
            _check_header(line_no, line, EDGE_COLUMNS)
            header_seen = True
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise BadRow(line_no, f"expected 3 columns, got {len(cols)}")
        src, dst, kind = cols
        if not src or not dst:
            raise BadRow(line_no, "empty endpoint")
        try:
            k = EdgeKind.parse(kind)
        except ValueError:
            if not lenient:
                raise UnknownEdgeKind(line_no, f"unknown edge kind {kind!r}") from None
            if report is not None:
                report.unknown_kinds += 1
            continue
        out.append(DepEdge(src, dst, k))
    return out


def _parse_jsonl(stream, columns):
    rows = []
    for line_no, line in _lines(stream):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BadRow(line_no, f"invalid JSON: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise BadRow(line_no, "expected a JSON object")
        missing = [c for c in columns if c not in obj and c not in ("name", "parent")]
        if missing:
            raise BadRow(line_no, f"missing key(s) {missing}")
        rows.append(tuple("" if obj.get(c) is None else str(obj.get(c)) for c in columns))
    return rows


def parse_nodes_jsonl(stream, lenient=False, report=None) -> list[Entity]:
    buf = io.StringIO("\t".join(NODE_COLUMNS) + "\n"
                      + "".join("\t".join(r) + "\n" for r in _parse_jsonl(stream, NODE_COLUMNS)))
    return parse_nodes(buf, lenient, report)


def parse_edges_jsonl(stream, lenient=False, report=None) -> list[DepEdge]:
    buf = io.StringIO("\t".join(EDGE_COLUMNS) + "\n"
                      + "".join("\t".join(r) + "\n" for r in _parse_jsonl(stream, EDGE_COLUMNS)))
    return parse_edges(buf, lenient, report)


def build_graph(entities: Iterable[Entity], edges: Iterable[DepEdge],
                lenient: bool = False, report: IngestReport | None = None) -> DependencyGraph:
    """Populate and seal a builder.

    Strict mode propagates every seal error. Lenient mode drops edges with
    unknown endpoints and self-loops, clears unknown parents and keeps the
    first of two conflicting entity rows, recording each in ``report``.
    """
    if not lenient:
        b = GraphBuilder()
        for e in entities:
            b.add_entity(e)
        for e in edges:
            b.add_edge(e)
        return b.seal()

    report = report if report is not None else IngestReport()
    ents: dict[str, Entity] = {}
    for e in entities:
        old = ents.get(e.id)
        if old is not None and old != e:
            report.duplicate_ids += 1
            report.warn(f"conflicting rows for id {e.id!r}; keeping the first")
            continue
        ents[e.id] = e
    b = GraphBuilder()
    for e in ents.values():
        if e.parent is not None and e.parent not in ents:
            report.cleared_parents += 1
            report.warn(f"unknown parent {e.parent!r} of {e.id!r} cleared")
            e = Entity(e.id, e.kind, e.name, None)
        b.add_entity(e)
    for e in edges:
        if e.src not in ents or e.dst not in ents:
            report.dropped_edges += 1
            continue
        if e.src == e.dst:
            report.dropped_self_loops += 1
            continue
        b.add_edge(e)
    if report.dropped_edges:
        report.warn(f"dropped {report.dropped_edges} edge(s) with unknown endpoints")
    try:
        return b.seal()
    except DanglingParent:
        # parent of a coarser-kind violation: clear and retry
        return _seal_clearing_bad_parents(b, report)


def _seal_clearing_bad_parents(b, report):
    b2 = GraphBuilder()
    kinds = {e.id: e.kind for e in b._entities.values()}
    for e in b._entities.values():
        if e.parent is not None and kinds[e.parent].rank >= e.kind.rank:
            report.cleared_parents += 1
            report.warn(f"parent {e.parent!r} of {e.id!r} is not coarser; cleared")
            e = Entity(e.id, e.kind, e.name, None)
        b2.add_entity(e)
    for e in b._edges:
        b2.add_edge(e)
    return b2.seal()


# -- bulk path --------------------------------------------------------------

def _open_text(path):
    try:
        return open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from None


def _is_jsonl(path):
    return str(path).lower().endswith((".jsonl", ".ndjson"))


def _read_table(path, columns, chunksize):
    """Yield DataFrame chunks of string columns after checking the header."""
    with _open_text(path) as fh:
        first = ""
        line_no = 0
        for line_no, first in enumerate(fh, 1):
            if first.strip():
                break
        if not first.strip():
            return
        _check_header(line_no, first.rstrip("\r\n").rstrip(" "), columns)
        reader = pd.read_csv(fh, sep="\t", header=None, names=list(columns), dtype=str,
                             keep_default_na=False, na_filter=False, quoting=csv.QUOTE_NONE,
                             skip_blank_lines=True, chunksize=chunksize, engine="c")
        try:
            for chunk in reader:
                yield chunk
        except pd.errors.ParserError as exc:
            m = re.search(r"line (\d+)", str(exc))
            raise BadRow(int(m.group(1)) + line_no if m else -1, "wrong column count") from None


def _kind_codes(series, mapping):
    """Map a string column to integer codes via its categories; -1 if unknown."""
    cat = series.astype("category")
    lut = np.array([mapping.get(c.strip().lower(), -1) for c in cat.cat.categories] + [-1],
                   dtype=np.int64)
    return lut[cat.cat.codes.to_numpy()]


def read_graph(nodes_path, edges_path, lenient: bool = False,
               report: IngestReport | None = None,
               chunksize: int = _BULK_CHUNK) -> DependencyGraph:
    """Read a graph from node and edge tables on disk.

    TSV inputs go through a vectorised, chunked reader so that tens of
    millions of edges fit in memory; JSON-lines inputs use the row parsers.
    """
    report = report if report is not None else IngestReport()
    if _is_jsonl(nodes_path) or _is_jsonl(edges_path):
        with _open_text(nodes_path) as fh:
            ents = (parse_nodes_jsonl if _is_jsonl(nodes_path) else parse_nodes)(fh, lenient, report)
        with _open_text(edges_path) as fh:
            edges = (parse_edges_jsonl if _is_jsonl(edges_path) else parse_edges)(fh, lenient, report)
        return build_graph(ents, edges, lenient, report)

    frames = list(_read_table(nodes_path, NODE_COLUMNS, chunksize))
    nodes = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=list(NODE_COLUMNS), dtype=str)
    if (nodes["id"] == "").any():
        raise BadRow(-1, "empty node id")
    nodes["parent"] = nodes["parent"].str.strip()
    nodes = nodes.drop_duplicates()
    dup = nodes["id"].duplicated(keep="first")
    if dup.any():
        if not lenient:
            raise DuplicateId(nodes.loc[dup, "id"].iloc[0])
        report.duplicate_ids += int(dup.sum())
        nodes = nodes[~dup]
    codes = _kind_codes(nodes["kind"], {k.value: k.code for k in ENTITY_KINDS})
    unknown = codes < 0
    if unknown.any():
        if not lenient:
            raise BadRow(-1, f"unknown entity kind {nodes['kind'].to_numpy()[unknown][0]!r}")
        report.unknown_kinds += int(unknown.sum())
        codes[unknown] = EntityKind.OTHER.code
    ids = nodes["id"].tolist()
    index = pd.Index(ids)
    parent_col = nodes["parent"].to_numpy()
    parents = index.get_indexer(parent_col).astype(np.int64)
    bad = (parents < 0) & (parent_col != "")
    if bad.any():
        if not lenient:
            raise DanglingParent("unknown parent(s)",
                                 [("dangling-parent", i) for i in np.asarray(ids, dtype=object)[bad]])
        report.cleared_parents += int(bad.sum())
    kind_codes = np.asarray(codes, dtype=np.uint8)
    if lenient:
        ranks = np.array([k.rank for k in ENTITY_KINDS])
        has = parents >= 0
        wrong = np.zeros(len(parents), dtype=bool)
        wrong[has] = ranks[kind_codes[parents[has]]] >= ranks[kind_codes[has]]
        report.cleared_parents += int(wrong.sum())
        parents[wrong] = -1

    src_parts, dst_parts, kind_parts = [], [], []
    edge_map = {k.value: k.code for k in EdgeKind}
    missing = []
    for chunk in _read_table(edges_path, EDGE_COLUMNS, chunksize):
        s = index.get_indexer(chunk["src"].to_numpy())
        d = index.get_indexer(chunk["dst"].to_numpy())
        k = _kind_codes(chunk["kind"], edge_map)
        kn = k < 0
        if kn.any():
            if not lenient:
                raise UnknownEdgeKind(-1, f"unknown edge kind {chunk['kind'].to_numpy()[kn][0]!r}")
            report.unknown_kinds += int(kn.sum())
        ok = (s >= 0) & (d >= 0) & ~kn
        dangling = (s < 0) | (d < 0)
        if dangling.any():
            if not lenient:
                ends = np.concatenate([chunk["src"].to_numpy()[s < 0], chunk["dst"].to_numpy()[d < 0]])
                missing.extend(ends[:1000].tolist())
            report.dropped_edges += int((dangling & ~kn).sum())
        loops = ok & (s == d)
        if loops.any():
            if not lenient:
                raise SelfLoop(ids[s[loops][0]])
            report.dropped_self_loops += int(loops.sum())
            ok &= ~loops
        src_parts.append(s[ok].astype(np.int64))
        dst_parts.append(d[ok].astype(np.int64))
        kind_parts.append(k[ok].astype(np.uint8))
        del chunk
    if missing:
        ids_missing = sorted(set(missing))
        raise UnknownEndpoint(f"unknown edge endpoint(s): {', '.join(ids_missing[:10])}",
                              [("unknown-endpoint", i) for i in ids_missing])
    if report.dropped_edges:
        report.warn(f"dropped {report.dropped_edges} edge(s) with unknown endpoints")
    cat = (lambda parts, dt: np.concatenate(parts) if parts else np.zeros(0, dtype=dt))
    return DependencyGraph.from_arrays(
        ids, kind_codes, cat(src_parts, np.int64), cat(dst_parts, np.int64),
        cat(kind_parts, np.uint8), names=nodes["name"].tolist(), parents=parents)


def read_graph_dir(path, lenient=False, report=None) -> DependencyGraph:
    """Read ``nodes.tsv``/``edges.tsv`` (or ``.jsonl``) from a directory."""
    for ext in ("tsv", "jsonl"):
        n = os.path.join(path, f"nodes.{ext}")
        e = os.path.join(path, f"edges.{ext}")
        if os.path.exists(n) and os.path.exists(e):
            return read_graph(n, e, lenient, report)
    raise IoError(path, "no nodes.tsv/edges.tsv (or .jsonl) pair found")


# -- theory headers ---------------------------------------------------------

@dataclass(frozen=True)
class TheoryHeader:
    name: str
    imports: tuple[str, ...] = ()


_KEYWORDS = {"theory", "imports", "keywords", "abbrevs", "begin"}
_IDENT = re.compile(r"[A-Za-z0-9_'.\-]+")


def _tokens(text):
    """Yield ``(position, kind, value)`` with kind in {'ident', 'string', 'sym'}.

    Nested ``(* ... *)`` comments and whitespace are dropped.
    """
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif text.startswith("(*", i):
            start, depth = i, 0
            while i < n:
                if text.startswith("(*", i):
                    depth += 1
                    i += 2
                elif text.startswith("*)", i):
                    depth -= 1
                    i += 2
                    if depth == 0:
                        break
                else:
                    i += 1
            if depth:
                raise ParseError(start, "'*)' closing comment")
        elif c == '"':
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    j += 1
                buf.append(text[j])
                j += 1
            if j >= n:
                raise ParseError(i, "closing '\"'")
            yield i, "string", "".join(buf)
            i = j + 1
        else:
            m = _IDENT.match(text, i)
            if m:
                yield i, "ident", m.group()
                i = m.end()
            else:
                yield i, "sym", c
                i += 1


def parse_theory_header(source_text: str) -> TheoryHeader:
    """Parse ``theory NAME [imports A B ...] [keywords ...] [abbrevs ...] begin``."""
    toks = _tokens(source_text)
    end = len(source_text)

    def take():
        return next(toks, (end, "eof", None))

    pos, kind, val = take()
    if kind != "ident" or val != "theory":
        raise ParseError(pos, "'theory'")
    pos, kind, name = take()
    if kind == "eof":
        raise MissingBegin(pos)
    if kind not in ("ident", "string") or (kind == "ident" and name in _KEYWORDS) or not name:
        raise ParseError(pos, "theory name")
    imports: dict[str, None] = {}
    pos, kind, val = take()
    if kind == "ident" and val == "imports":
        pos, kind, val = take()
        while kind == "string" or (kind == "ident" and val not in _KEYWORDS):
            imports[val] = None
            pos, kind, val = take()
        if not imports:
            if kind == "eof":
                raise MissingBegin(pos)
            raise ParseError(pos, "import name")
    while kind == "ident" and val in ("keywords", "abbrevs"):
        pos, kind, val = take()
        while kind != "eof" and not (kind == "ident" and val in ("begin", "keywords", "abbrevs")):
            pos, kind, val = take()
    if kind == "eof":
        raise MissingBegin(pos)
    if not (kind == "ident" and val == "begin"):
        raise ParseError(pos, "'begin'")
    return TheoryHeader(name, tuple(imports))
