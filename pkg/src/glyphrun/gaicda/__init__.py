"""Graph-based genetic clustering of documents (GA-ICDA) and the comparison baselines."""

from .baselines import cluster_em, cluster_hierarchical, fit_gmm
from .genetic import GaParams, cluster_ga
from .graph import DEFAULT_SUBSET, DocumentGraph, build_graph, modularity, normalize_features
from .partition import Partition, format_params, format_partition_csv, parse_partition_csv
from .pipeline import classify_gaicda, refine

__all__ = [
    "DEFAULT_SUBSET",
    "DocumentGraph",
    "GaParams",
    "Partition",
    "build_graph",
    "classify_gaicda",
    "cluster_em",
    "cluster_ga",
    "cluster_hierarchical",
    "fit_gmm",
    "format_params",
    "format_partition_csv",
    "modularity",
    "normalize_features",
    "parse_partition_csv",
    "refine",
]
