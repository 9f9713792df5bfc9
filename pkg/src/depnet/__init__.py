"""Dependency-network analysis for formal proof corpora and software systems."""

__version__ = "0.1.0"

from .graph import (Direction, DepEdge, DependencyGraph, EdgeKind, Entity, EntityKind,
                    GraphBuilder, UndirectedGraph)
from .degree import (DegreeDistribution, PowerLawFit, bootstrap_pvalue, ccdf, degree_histogram,
                     fit_power_law, loglog_slope, select_xmin)
from .nullmodels import erdos_renyi, power_law_sample, preferential_attachment
from .metrics import (EXACT, Exact, NodeMetrics, Sampled, betweenness, centrality,
                      compute_node_metrics, local_clustering)
from .community import (Partition, RefactoringRecommendation, compare_partitions,
                        declared_partition, detect_communities, level_view, modularity,
                        recommend_refactorings)
from .mining import (AssociationRule, FrequentItemset, Transaction, association_rules,
                     extract_transactions, frequent_itemsets, suggest_premises)
from .ingest import read_graph, read_graph_dir
from .report import corpus_stats, read_snapshot, write_snapshot
