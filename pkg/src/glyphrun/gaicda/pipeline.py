from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import ClusteringError
from ..texture import FeatureVector
from .genetic import GaParams, cluster_ga
from .graph import DEFAULT_SUBSET, build_graph, normalize_features
from .partition import Partition


def refine(partition: Partition, vectors: np.ndarray, target_clusters: int) -> Partition:
    """Merge the two clusters with the closest centroids until ``target_clusters`` remain.

    ``vectors`` rows follow ``partition.doc_ids``. Ties go to the lowest label pair.
    """
    X = np.asarray(vectors, dtype=float)
    if X.shape[0] != len(partition.assignment):
        raise ClusteringError("vectors and partition differ in length")
    if partition.k < target_clusters:
        raise ClusteringError(
            f"partition has {partition.k} clusters, fewer than the target {target_clusters}; refinement only merges"
        )
    labels = np.array(partition.labels)
    clusters = {lab: list(np.flatnonzero(labels == lab)) for lab in range(partition.k)}
    merges = 0
    while len(clusters) > target_clusters:
        keys = sorted(clusters)
        cent = {c: X[clusters[c]].mean(axis=0) for c in keys}
        best = None
        for ai, a in enumerate(keys):
            for b in keys[ai + 1:]:
                d = float(np.linalg.norm(cent[a] - cent[b]))
                if best is None or d < best[0]:
                    best = (d, a, b)
        _, a, b = best
        clusters[a] = sorted(clusters[a] + clusters.pop(b))
        merges += 1
    for lab, members in clusters.items():
        labels[members] = lab
    params = {**partition.params, "refine_merges": merges, "target_clusters": target_clusters}
    return Partition.from_labels(partition.doc_ids, labels.tolist(), partition.method, partition.seed, params)


def classify_gaicda(
    vectors: Sequence[FeatureVector],
    params: GaParams | None = None,
    threshold: int = 5,
    neighbor_count: int = 3,
    features: Sequence[str] = DEFAULT_SUBSET,
) -> Partition:
    """Normalize, build the thresholded graph, run the GA, then merge down to the target count."""
    params = params or GaParams()
    if len(vectors) < params.target_clusters:
        raise ClusteringError(
            f"{len(vectors)} documents cannot form {params.target_clusters} clusters"
        )
    doc_ids = [v.doc_id for v in vectors]
    Z = normalize_features(vectors, features)
    graph = build_graph(Z, doc_ids, threshold, neighbor_count, names=tuple(features))
    raw = cluster_ga(graph, params, min_clusters=params.target_clusters)
    refined = refine(raw, Z, params.target_clusters)
    record = {
        **params.as_dict(),
        "threshold": threshold,
        "neighbor_count": neighbor_count,
        "features": ",".join(features),
        "edges": len(graph.edges),
        "ga_clusters": raw.k,
        "modularity": raw.params["modularity"],
        "refine_merges": refined.params["refine_merges"],
    }
    return Partition(refined.assignment, "gaicda", params.rng_seed, record)
