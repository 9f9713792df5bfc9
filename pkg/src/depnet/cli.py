"""``depnet`` command line.

Exit codes: 0 success, 1 validation or I/O error, 2 usage error. Data goes
to ``--out`` (written atomically, with a ``<out>.meta.json`` sidecar for run
metadata) or to standard output; diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import asdict, replace

import numpy as np

from . import __version__
from .community import (compare_partitions, declared_partition, detect_communities, level_view,
                        modularity, recommend_refactorings)
from .degree import bootstrap_pvalue, degree_histogram, fit_power_law, select_xmin
from .errors import DepNetError, IoError
from .graph import EntityKind
from .ingest import IngestReport, read_graph, read_graph_dir
from .metrics import compute_node_metrics, parse_betweenness_mode
from .mining import (association_rules, extract_transactions, frequent_itemsets,
                     relative_support, suggest_premises)
from .nullmodels import erdos_renyi, power_law_sample, preferential_attachment
from .report import (atomic_open, corpus_stats, csv_text, degree_csv, is_snapshot,
                     itemsets_csv, metrics_csv, read_rules_csv, read_snapshot,
                     recommendations_csv, rules_csv, write_graph_tsv, write_snapshot)

log = logging.getLogger("depnet")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _kinds(text):
    try:
        return {EntityKind.parse(k) for k in text.split(",") if k.strip()}
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _support(text):
    try:
        return float(text) if "." in text else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid support {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="depnet", description="Dependency-network analysis of proof corpora.")
    p.add_argument("--version", action="version", version=f"depnet {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def graph_cmd(name, help, fmt="csv"):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--graph", required=True,
                        help="snapshot file, or directory with nodes.tsv/edges.tsv (or .jsonl)")
        sp.add_argument("--lenient", action="store_true", help="drop dangling edges instead of failing")
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt)
        return sp

    sp = sub.add_parser("ingest", help="validate tables and cache them as a binary snapshot")
    sp.add_argument("--graph", help="directory with nodes/edges tables")
    sp.add_argument("--nodes")
    sp.add_argument("--edges")
    sp.add_argument("--lenient", action="store_true")
    sp.add_argument("--out", required=True, help="snapshot path")
    sp.add_argument("--format", choices=("csv", "json"), default="json")

    sp = graph_cmd("stats", "node, edge, entry and lemma counts", fmt="json")
    sp.add_argument("--sources", help="directory of theory files for line counting")

    sp = graph_cmd("degree", "degree histogram as deg,count CSV")
    sp.add_argument("--direction", choices=("in", "out"), default="in")
    sp.add_argument("--kinds", type=_kinds, help="comma-separated node kinds to count")
    sp.add_argument("--normalized", action="store_true")

    sp = sub.add_parser("fit", help="discrete power-law fit of degrees or samples")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--samples", help="file with one non-negative integer per line")
    sp.add_argument("--lenient", action="store_true")
    sp.add_argument("--direction", choices=("in", "out"), default="in")
    sp.add_argument("--kinds", type=_kinds)
    sp.add_argument("--xmin", type=int)
    sp.add_argument("--min-tail", type=int, default=50)
    sp.add_argument("--bootstrap", type=int, default=0, metavar="N")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("csv", "json"), default="json")

    sp = sub.add_parser("generate", help="seeded null-model graphs and samples")
    gen = sp.add_subparsers(dest="model", metavar="MODEL", parser_class=_Parser)
    gen.required = True
    g = gen.add_parser("er", help="Erdos-Renyi digraph")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, required=True)
    g = gen.add_parser("pa", help="preferential attachment digraph")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g = gen.add_parser("plsample", help="discrete power-law sample")
    g.add_argument("--gamma", type=float, required=True)
    g.add_argument("--xmin", type=int, default=1)
    g.add_argument("--n", type=int, required=True)
    for g in gen.choices.values():
        g.add_argument("--seed", type=int, default=0)
        g.add_argument("--out", help="output directory (graphs) or file (samples)")
        g.add_argument("--snapshot", action="store_true", help="write a snapshot file instead of TSVs")

    sp = graph_cmd("metrics", "per-node network metrics")
    sp.add_argument("--betweenness", default="exact", help="exact | sampled:K")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--damping", type=float, default=0.85)

    sp = graph_cmd("communities", "Louvain communities vs declared structure")
    sp.add_argument("--level", choices=("session", "theory"), default="session")
    sp.add_argument("--all-nodes", action="store_true",
                    help="cluster the whole graph instead of the level's member nodes")

    sp = graph_cmd("recommend", "refactoring recommendations")
    sp.add_argument("--level", choices=("session", "theory"), default="session")
    sp.add_argument("--min-confidence", type=float, required=True)

    sp = graph_cmd("mine", "frequent itemsets and association rules over fact dependencies")
    sp.add_argument("--min-support", type=_support, required=True, help="count, or fraction if it has a '.'")
    sp.add_argument("--min-confidence", type=float)
    sp.add_argument("--item-kinds", type=_kinds, default={EntityKind.FACT, EntityKind.CONSTANT})
    sp.add_argument("--rules-out", help="rules CSV path")

    sp = sub.add_parser("suggest", help="rank premises implied by association rules")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--rules", help="rules.csv from `mine`")
    src.add_argument("--graph")
    sp.add_argument("--lenient", action="store_true")
    sp.add_argument("--items", required=True, help="comma-separated known premises")
    sp.add_argument("-k", type=int, default=10)
    sp.add_argument("--min-support", type=_support, default=2)
    sp.add_argument("--min-confidence", type=float, default=0.5)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


# -- helpers ------------------------------------------------------------------

def load_graph(path, lenient=False):
    report = IngestReport()
    if os.path.isdir(path):
        g = read_graph_dir(path, lenient, report)
    elif is_snapshot(path):
        g = read_snapshot(path)
    else:
        raise IoError(path, "neither a snapshot nor a directory of tables")
    if report.warning_count:
        log.warning("%d ingest warning(s)", report.warning_count)
    return g


def _emit(args, text: str):
    out = getattr(args, "out", None)
    if out:
        with atomic_open(out) as fh:
            fh.write(text)
        _sidecar(out, args)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _sidecar(path, args):
    meta = {"command": args.command, "argv": sys.argv[1:], "version": __version__,
            "created_unix": time.time()}
    with atomic_open(f"{path}.meta.json") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- subcommands --------------------------------------------------------------

def cmd_ingest(args):
    report = IngestReport()
    if args.nodes and args.edges:
        g = read_graph(args.nodes, args.edges, args.lenient, report)
    elif args.graph:
        g = read_graph_dir(args.graph, args.lenient, report)
    else:
        raise UsageError("ingest needs --graph DIR or both --nodes and --edges")
    write_snapshot(g, args.out)
    _sidecar(args.out, args)
    summary = {"nodes": g.node_count, "edges": g.edge_count, "warnings": report.warning_count,
               "dropped_edges": report.dropped_edges, "snapshot": args.out}
    sys.stderr.write(_json(summary) if args.format == "json"
                     else f"ingested {g.node_count} nodes, {g.edge_count} edges\n")


def cmd_stats(args):
    st = corpus_stats(load_graph(args.graph, args.lenient), args.sources)
    d = st.to_dict()
    if args.format == "json":
        _emit(args, _json(d))
    else:
        rows = [("nodes", d["nodes"]), ("edges", d["edges"]), ("entries", d["entries"]),
                ("lemmas", d["lemmas"])]
        rows += [(f"nodes.{k}", v) for k, v in d["nodes_by_kind"].items()]
        if d["loc"] is not None:
            rows.append(("loc", d["loc"]))
        _emit(args, csv_text(("key", "value"), rows))


def cmd_degree(args):
    dist = degree_histogram(load_graph(args.graph, args.lenient), args.direction, args.kinds)
    if args.format == "json":
        key = "pr" if args.normalized else "count"
        vals = dist.pmf() if args.normalized else dict(sorted(dist.histogram.items()))
        _emit(args, _json({"direction": args.direction, "n": dist.n,
                           "rows": [{"deg": d, key: v} for d, v in vals.items()]}))
    else:
        _emit(args, degree_csv(dist, args.normalized))


def _read_samples(path):
    try:
        data = np.loadtxt(path, dtype=np.int64, ndmin=1)
    except ValueError as exc:
        raise DepNetError(f"{path}: {exc}") from None
    except OSError as exc:
        raise IoError(path, str(exc)) from None
    return data


def cmd_fit(args):
    if args.samples:
        samples = _read_samples(args.samples)
    else:
        g = load_graph(args.graph, args.lenient)
        samples = degree_histogram(g, args.direction, args.kinds).samples()
    fit = fit_power_law(samples, args.xmin) if args.xmin else select_xmin(samples, args.min_tail)
    if args.bootstrap:
        fit = replace(fit, p_value=bootstrap_pvalue(samples, fit, args.bootstrap, args.seed, args.min_tail))
    d = asdict(fit)
    if args.format == "json":
        _emit(args, _json(d))
    else:
        _emit(args, csv_text(tuple(d), [tuple(d.values())]))


def cmd_generate(args):
    if args.model == "plsample":
        x = power_law_sample(args.gamma, args.xmin, args.n, args.seed)
        _emit(args, "".join(f"{v}\n" for v in x.tolist()))
        return
    g = (erdos_renyi(args.n, args.p, args.seed) if args.model == "er"
         else preferential_attachment(args.n, args.m, args.seed))
    if not args.out:
        raise UsageError("generate er|pa requires --out")
    if args.snapshot:
        write_snapshot(g, args.out)
        _sidecar(args.out, args)
    else:
        write_graph_tsv(g, args.out)
        _sidecar(os.path.join(args.out, "graph"), args)
    sys.stderr.write(f"generated {g.node_count} nodes, {g.edge_count} edges\n")


def cmd_metrics(args):
    g = load_graph(args.graph, args.lenient)
    rows = compute_node_metrics(g, parse_betweenness_mode(args.betweenness, args.seed), args.damping)
    if args.format == "json":
        _emit(args, _json([asdict(r) for r in rows]))
    else:
        _emit(args, metrics_csv(rows))


def _level(args):
    g = load_graph(args.graph, args.lenient)
    if getattr(args, "all_nodes", False):
        return g, declared_partition(g, args.level)
    return level_view(g, args.level)


def cmd_communities(args):
    sub, declared = _level(args)
    ug = sub.undirected_projection()
    pred = detect_communities(ug)
    q = modularity(ug, pred)
    ari = compare_partitions(declared, pred)
    if args.format == "json":
        _emit(args, _json({"level": args.level, "modularity": q, "ari": ari,
                           "declared_modularity": modularity(ug, declared),
                           "communities": pred.n_communities,
                           "assignment": dict(sorted(pred.assignment.items()))}))
    else:
        sys.stderr.write(f"modularity={q!r} ari={ari!r} communities={pred.n_communities}\n")
        _emit(args, csv_text(("id", "community", "declared"),
                             ((v, pred.assignment[v], declared.group_of(v)) for v in sorted(pred.assignment))))


def cmd_recommend(args):
    sub, declared = _level(args)
    pred = detect_communities(sub.undirected_projection())
    recs = recommend_refactorings(sub, declared, pred, args.min_confidence)
    if args.format == "json":
        _emit(args, _json([asdict(r) for r in recs]))
    else:
        _emit(args, recommendations_csv(recs))


def _mine(g, min_support, min_confidence, item_kinds):
    tx = extract_transactions(g, item_kinds)
    ms = relative_support(min_support, len(tx)) if isinstance(min_support, float) else min_support
    sets = frequent_itemsets(tx, ms)
    rules = association_rules(sets, tx, min_confidence) if min_confidence is not None else None
    return tx, sets, rules


def cmd_mine(args):
    if args.min_confidence is not None and args.format == "csv" and not args.rules_out:
        raise UsageError("--min-confidence with CSV output needs --rules-out")
    g = load_graph(args.graph, args.lenient)
    tx, sets, rules = _mine(g, args.min_support, args.min_confidence, args.item_kinds)
    if args.format == "json":
        doc = {"transactions": len(tx),
               "itemsets": [{"items": list(f.items), "support": f.support} for f in sets]}
        if rules is not None:
            doc["rules"] = [asdict(r) for r in rules]
        _emit(args, _json(doc))
        return
    _emit(args, itemsets_csv(sets))
    if rules is not None:
        with atomic_open(args.rules_out) as fh:
            fh.write(rules_csv(rules))


def cmd_suggest(args):
    if args.rules:
        rules = read_rules_csv(args.rules)
    else:
        _, _, rules = _mine(load_graph(args.graph, args.lenient), args.min_support,
                            args.min_confidence, {EntityKind.FACT, EntityKind.CONSTANT})
    items = [s for s in args.items.split(",") if s]
    ranked = suggest_premises(rules, items, args.k)
    if args.format == "json":
        _emit(args, _json({"query": items, "suggestions": ranked}))
    else:
        _emit(args, csv_text(("rank", "item"), enumerate(ranked, 1)))


COMMANDS = {
    "ingest": cmd_ingest, "stats": cmd_stats, "degree": cmd_degree, "fit": cmd_fit,
    "generate": cmd_generate, "metrics": cmd_metrics, "communities": cmd_communities,
    "recommend": cmd_recommend, "mine": cmd_mine, "suggest": cmd_suggest,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    fmt = "csv"
    if argv is None:
        argv = sys.argv[1:]
    if "--format" in argv:
        i = argv.index("--format")
        if i + 1 < len(argv):
            fmt = argv[i + 1]
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        COMMANDS[args.command](args)
        return 0
    except UsageError as exc:
        _report_error(fmt, "UsageError", str(exc))
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (DepNetError, OSError, ValueError) as exc:
        _report_error(fmt, type(exc).__name__, str(exc))
        return 1


def _report_error(fmt, kind, message):
    if fmt == "json":
        sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    else:
        sys.stderr.write(f"depnet: {kind}: {message}\n" if kind != "UsageError" else message + "\n")


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
