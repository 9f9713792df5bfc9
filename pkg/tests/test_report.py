import csv
import io

import pytest

from depnet.community import RefactoringRecommendation
from depnet.degree import DegreeDistribution
from depnet.errors import BadRow, IoError
from depnet.graph import DepEdge, EdgeKind, Entity, EntityKind, GraphBuilder
from depnet.metrics import compute_node_metrics
from depnet.mining import association_rules, frequent_itemsets
from depnet.nullmodels import erdos_renyi, preferential_attachment
from depnet.report import (atomic_open, corpus_stats, count_lines, degree_csv, emit_degree_csv,
                           is_snapshot, itemsets_csv, metrics_csv, read_rules_csv, read_snapshot,
                           recommendations_csv, rules_csv, write_snapshot)


def dist(h):
    return DegreeDistribution("in", dict(h), sum(h.values()))


def test_degree_csv_examples():
    d = dist({0: 2, 1: 1, 2: 1})
    assert degree_csv(d) == "deg,count\n0,2\n1,1\n2,1\n"
    assert degree_csv(d, normalized=True) == "deg,pr\n0,0.5\n1,0.25\n2,0.25\n"
    assert degree_csv(dist({})) == "deg,count\n"


def test_degree_csv_shortest_round_trip():
    text = degree_csv(dist({1: 1, 2: 2}), normalized=True)
    assert text == "deg,pr\n1,0.3333333333333333\n2,0.6666666666666666\n"


def test_emit_degree_csv_sinks():
    d = dist({0: 2, 1: 1, 2: 1})
    b = io.BytesIO()
    assert emit_degree_csv(d, False, b) == len(b.getvalue()) == 22
    s = io.StringIO()
    emit_degree_csv(d, True, s)
    assert s.getvalue() == "deg,pr\n0,0.5\n1,0.25\n2,0.25\n"


def test_emit_degree_csv_io_error():
    class Broken(io.RawIOBase):
        name = "broken"

        def write(self, data):
            raise OSError("disk full")

    with pytest.raises(IoError):
        emit_degree_csv(dist({1: 1}), False, Broken())


def fixture_graph():
    b = GraphBuilder()
    for s in ("S1", "S2"):
        b.add_entity(Entity(s, EntityKind.SESSION))
    for t, s in (("T1", "S1"), ("T2", "S1"), ("T3", "S2")):
        b.add_entity(Entity(t, EntityKind.THEORY, parent=s))
    for i in range(10):
        b.add_entity(Entity(f"f{i}", EntityKind.FACT, parent=f"T{i % 3 + 1}"))
    for i in range(1, 10):
        b.add_edge(DepEdge(f"f{i}", f"f{i - 1}"))
    b.add_edge(DepEdge("T2", "T1", EdgeKind.IMPORTS))
    return b.seal()


def test_stats_empty():
    r = corpus_stats(GraphBuilder().seal())
    assert r.node_count == 0 and r.edge_count == 0 and r.entries == 0 and r.lemmas == 0
    assert all(v == 0 for v in r.nodes_by_kind.values())
    assert r.loc is None


def test_stats_fixture(tmp_path):
    r = corpus_stats(fixture_graph())
    assert (r.entries, r.lemmas, r.edge_count, r.node_count) == (2, 10, 10, 15)
    assert r.nodes_by_kind[EntityKind.THEORY] == 3
    d = r.to_dict()
    assert d["nodes_by_kind"]["fact"] == 10 and d["loc"] is None


def test_count_lines(tmp_path):
    (tmp_path / "a.thy").write_text("theory A\nbegin\nend\n")
    sub = tmp_path / "sub"
    sub.mkdir()
    (sub / "b.thy").write_text("x\r\ny\n\nlast line without newline")
    (sub / "notes.txt").write_text("1\n2\n3\n")
    assert count_lines(tmp_path) == 6
    assert corpus_stats(fixture_graph(), tmp_path).loc == 6
    with pytest.raises(IoError):
        count_lines(tmp_path / "missing")


def test_snapshot_round_trip(tmp_path):
    for g in (fixture_graph(), preferential_attachment(300, 2, 5), GraphBuilder().seal()):
        p = tmp_path / "g.snap"
        write_snapshot(g, p)
        assert is_snapshot(p)
        back = read_snapshot(p)
        assert back == g
        assert [back.entity(v) for v in back.ids] == [g.entity(v) for v in g.ids]
        first = p.read_bytes()
        write_snapshot(back, p)
        assert p.read_bytes() == first


def test_snapshot_header(tmp_path):
    p = tmp_path / "g.snap"
    write_snapshot(erdos_renyi(3, 1.0, 0), p)
    raw = p.read_bytes()
    assert raw[:8] == b"DEPNETSN"
    assert int.from_bytes(raw[8:12], "little") == 1
    assert int.from_bytes(raw[12:20], "little") == 3
    assert int.from_bytes(raw[20:28], "little") == 6


def test_snapshot_corrupt(tmp_path):
    p = tmp_path / "bad.snap"
    p.write_bytes(b"DEPNETSN\x01")
    with pytest.raises(IoError):
        read_snapshot(p)
    write_snapshot(erdos_renyi(5, 0.5, 0), p)
    p.write_bytes(p.read_bytes()[:-3])
    with pytest.raises(IoError):
        read_snapshot(p)
    p.write_bytes(b"notasnapshot" * 4)
    assert not is_snapshot(p)
    with pytest.raises(IoError):
        read_snapshot(p)
    with pytest.raises(IoError):
        read_snapshot(tmp_path / "missing.snap")


def test_metrics_csv():
    rows = compute_node_metrics(erdos_renyi(6, 0.4, 1))
    parsed = list(csv.DictReader(io.StringIO(metrics_csv(rows))))
    assert len(parsed) == 6
    assert parsed[0].keys() == {"id", "in_degree", "out_degree", "ego_nodes", "ego_edges",
                                "clustering", "betweenness", "centrality"}
    assert float(parsed[0]["centrality"]) == rows[0].centrality


def test_recommendations_csv():
    text = recommendations_csv([RefactoringRecommendation("d", "S2", "S1", 0.75)])
    assert text == "entity,declared,suggested,confidence\nd,S2,S1,0.75\n"


def test_itemsets_and_rules_csv(tmp_path):
    db = [{"A", "B"}, {"A", "B", "C"}, {"A", "C"}, {"B"}]
    sets = frequent_itemsets(db, 2)
    assert itemsets_csv(sets) == "items,support\nA,3\nB,3\nC,2\nA;B,2\nA;C,2\n"
    rules = association_rules(sets, db, 0.5)
    p = tmp_path / "rules.csv"
    p.write_text(rules_csv(rules))
    assert read_rules_csv(p) == rules


def test_read_rules_csv_bad(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("a,b\n")
    with pytest.raises(BadRow):
        read_rules_csv(p)
    p.write_text("antecedent,consequent,support,confidence\nA,B,x,0.5\n")
    with pytest.raises(BadRow):
        read_rules_csv(p)


def test_atomic_open_leaves_no_partial_file(tmp_path):
    target = tmp_path / "out.csv"
    with pytest.raises(RuntimeError):
        with atomic_open(target) as fh:
            fh.write("half")
            raise RuntimeError
    assert not target.exists()
    assert list(tmp_path.iterdir()) == []
    with atomic_open(target) as fh:
        fh.write("ok\n")
    assert target.read_text() == "ok\n"
