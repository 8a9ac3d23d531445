from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ..errors import ClusteringError
from ..texture import FEATURE_NAMES, FeatureVector

DEFAULT_SUBSET = ("sre", "lre", "rp")
ORDERING_KEYS = ("sre", "lre", "rp")


def normalize_features(vectors: Sequence[FeatureVector], selected: Sequence[str] = DEFAULT_SUBSET) -> np.ndarray:
    """Z-score each selected feature over the batch; constant columns become zeros."""
    if len(vectors) < 2:
        raise ClusteringError("need at least 2 feature vectors to normalize")
    unknown = [name for name in selected if name not in FEATURE_NAMES]
    if unknown or not selected:
        raise ClusteringError(f"invalid feature subset {list(selected)}")
    X = np.array([v.values(selected) for v in vectors], dtype=float)
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    Z = np.zeros_like(X)
    ok = sd > 0
    Z[:, ok] = (X[:, ok] - mu[ok]) / sd[ok]
    return Z


def node_ordering(Z: np.ndarray, doc_ids: Sequence[str], names: Sequence[str] = DEFAULT_SUBSET) -> tuple[int, ...]:
    """Node indices sorted lexicographically by the (sre, lre, rp) columns, ties by docId."""
    cols = [names.index(k) for k in ORDERING_KEYS if k in names] or list(range(Z.shape[1]))
    return tuple(sorted(range(len(doc_ids)), key=lambda i: (*(Z[i, c] for c in cols), doc_ids[i])))


@dataclass(frozen=True)
class DocumentGraph:
    doc_ids: tuple[str, ...]
    ordering: tuple[int, ...]  # ordering[pos] = node index
    threshold: int
    edges: Mapping[tuple[int, int], float]  # (u, v) with u < v
    vectors: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.doc_ids)
        if sorted(self.ordering) != list(range(n)):
            raise ClusteringError("ordering must be a permutation of the nodes")
        pos = self.positions
        for (u, v), w in self.edges.items():
            if not 0 <= u < v < n:
                raise ClusteringError(f"bad edge {(u, v)}")
            if not (np.isfinite(w) and w > 0):
                raise ClusteringError(f"edge {(u, v)} has non-positive or non-finite weight {w}")
            if abs(pos[u] - pos[v]) > self.threshold:
                raise ClusteringError(f"edge {(u, v)} exceeds ordering distance {self.threshold}")

    @classmethod
    def from_edges(cls, n: int, edges: Mapping[tuple[int, int], float], doc_ids=None):
        """Graph over ``n`` nodes with identity ordering and no distance bound."""
        norm = {(min(u, v), max(u, v)): float(w) for (u, v), w in edges.items()}
        ids = tuple(doc_ids) if doc_ids is not None else tuple(f"n{i:03d}" for i in range(n))
        return cls(ids, tuple(range(n)), max(n - 1, 1), norm)

    def __len__(self):
        return len(self.doc_ids)

    @property
    def positions(self) -> list[int]:
        pos = [0] * len(self.ordering)
        for p, node in enumerate(self.ordering):
            pos[node] = p
        return pos

    def adjacency(self) -> np.ndarray:
        n = len(self.doc_ids)
        A = np.zeros((n, n))
        for (u, v), w in self.edges.items():
            A[u, v] = A[v, u] = w
        return A

    def degrees(self) -> list[int]:
        deg = [0] * len(self.doc_ids)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg


def build_graph(
    Z: np.ndarray,
    doc_ids: Sequence[str],
    threshold: int = 5,
    neighbor_count: int = 3,
    names: Sequence[str] = DEFAULT_SUBSET,
) -> DocumentGraph:
    """Weighted document graph.

    Every node links to its ``neighbor_count`` nearest nodes (Euclidean, ties by
    docId) among those at most ``threshold`` positions away in the node
    ordering. Weights are ``exp(-d^2 / (2 sigma^2))`` with sigma the mean
    pairwise distance of the batch.
    """
    Z = np.asarray(Z, dtype=float)
    n = len(doc_ids)
    if n < 2:
        raise ClusteringError("a document graph needs at least 2 nodes")
    if Z.shape[0] != n:
        raise ClusteringError("feature rows and docIds differ in length")
    if threshold < 1 or neighbor_count < 1:
        raise ClusteringError("threshold and neighbor_count must be >= 1")

    D = squareform(pdist(Z))
    sigma = float(pdist(Z).mean())
    ordering = node_ordering(Z, doc_ids, names)
    pos = [0] * n
    for p, node in enumerate(ordering):
        pos[node] = p

    edges: dict[tuple[int, int], float] = {}
    for i in range(n):
        window = [ordering[p] for p in range(max(0, pos[i] - threshold), min(n, pos[i] + threshold + 1))]
        cands = sorted((j for j in window if j != i), key=lambda j: (D[i, j], doc_ids[j]))
        for j in cands[:neighbor_count]:
            d = D[i, j]
            w = 1.0 if sigma == 0 else float(np.exp(-(d * d) / (2 * sigma * sigma)))
            # underflow on huge distances would give w=0; keep the edge positive
            edges[(min(i, j), max(i, j))] = max(w, np.finfo(float).tiny)
    return DocumentGraph(tuple(doc_ids), ordering, threshold, edges, Z)


def modularity(A: np.ndarray, labels: Sequence[int]) -> float:
    """Weighted Newman modularity of a hard partition (0 for an edgeless graph)."""
    A = np.asarray(A, dtype=float)
    k = A.sum(axis=1)
    two_m = k.sum()
    if two_m == 0:
        return 0.0
    lab = np.asarray(labels)
    same = lab[:, None] == lab[None, :]
    return float(((A - np.outer(k, k) / two_m) * same).sum() / two_m)
