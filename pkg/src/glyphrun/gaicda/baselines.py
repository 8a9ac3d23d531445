"""Comparison classifiers: average-linkage agglomerative clustering and a diagonal GMM fitted by EM."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from ..errors import ClusteringError
from .partition import Partition


def _check(X, doc_ids, target):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != len(doc_ids):
        raise ClusteringError("feature matrix and docIds differ in length")
    if target < 1 or X.shape[0] < target:
        raise ClusteringError(f"{X.shape[0]} documents cannot form {target} clusters")
    return X


def cluster_hierarchical(X, doc_ids: Sequence[str], target_clusters: int, seed: int = 0) -> Partition:
    """Agglomerative average linkage on Euclidean distance, cut at ``target_clusters``.

    Deterministic; equal linkage distances merge the pair whose smallest docIds
    sort first. ``seed`` is only recorded.
    """
    X = _check(X, doc_ids, target_clusters)
    n = X.shape[0]
    D = np.sqrt(((X[:, None, :] - X[None, :, :]) ** 2).sum(-1))
    clusters = [[i] for i in range(n)]
    while len(clusters) > target_clusters:
        best = None
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                d = float(D[np.ix_(clusters[a], clusters[b])].mean())
                key = (d, *sorted((min(doc_ids[i] for i in clusters[a]), min(doc_ids[i] for i in clusters[b]))))
                if best is None or key < best[0]:
                    best = (key, a, b)
        _, a, b = best
        clusters[a] = clusters[a] + clusters[b]
        del clusters[b]
    labels = [0] * n
    for c, members in enumerate(clusters):
        for i in members:
            labels[i] = c
    return Partition.from_labels(
        list(doc_ids), labels, "hierarchical", seed, {"linkage": "average", "metric": "euclidean",
                                                      "target_clusters": target_clusters}
    )


@dataclass
class GmmFit:
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    responsibilities: np.ndarray
    log_likelihoods: list[float]
    converged: bool


def _log_density(X, weights, means, variances):
    # (n, k) log of weight_k * N(x | mean_k, diag(var_k))
    diff2 = (X[:, None, :] - means[None, :, :]) ** 2
    log_norm = -0.5 * (np.log(2 * np.pi * variances).sum(axis=1))
    with np.errstate(divide="ignore"):
        log_w = np.log(weights)
    return log_w[None, :] + log_norm[None, :] - 0.5 * (diff2 / variances[None, :, :]).sum(-1)


def fit_gmm(X, n_components: int, seed: int = 0, max_iter: int = 200, tol: float = 1e-8,
            var_floor: float = 1e-6) -> GmmFit:
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if n < n_components:
        raise ClusteringError(f"{n} documents cannot fit {n_components} components")
    rng = np.random.default_rng(seed)
    means = X[rng.choice(n, size=n_components, replace=False)].copy()
    variances = np.tile(np.maximum(X.var(axis=0), var_floor), (n_components, 1))
    weights = np.full(n_components, 1.0 / n_components)

    lls: list[float] = []
    converged = False
    for _ in range(max_iter):
        log_p = _log_density(X, weights, means, variances)
        log_tot = logsumexp(log_p, axis=1)
        ll = float(log_tot.sum())
        resp = np.exp(log_p - log_tot[:, None])
        if lls and ll - lls[-1] < tol:
            lls.append(ll)
            converged = True
            break
        lls.append(ll)
        nk = resp.sum(axis=0)
        weights = nk / n
        live = nk > 0
        means[live] = (resp.T @ X)[live] / nk[live, None]
        for c in np.flatnonzero(live):
            variances[c] = np.maximum(resp[:, c] @ (X - means[c]) ** 2 / nk[c], var_floor)
    log_p = _log_density(X, weights, means, variances)
    resp = np.exp(log_p - logsumexp(log_p, axis=1)[:, None])
    return GmmFit(weights, means, variances, resp, lls, converged)


def cluster_em(X, doc_ids: Sequence[str], target_clusters: int, seed: int = 0, **kwargs) -> Partition:
    """Hard assignment by maximum responsibility (ties to the lowest component)."""
    X = _check(X, doc_ids, target_clusters)
    fit = fit_gmm(X, target_clusters, seed, **kwargs)
    labels = np.argmax(fit.responsibilities, axis=1)
    return Partition.from_labels(
        list(doc_ids), labels.tolist(), "em", seed,
        {"components": target_clusters, "covariance": "diagonal", "iterations": len(fit.log_likelihoods),
         "converged": fit.converged, "log_likelihood": fit.log_likelihoods[-1]},
    )
