"""Genetic graph partitioning with locus-based adjacency chromosomes.

Gene ``i`` of a chromosome names one graph neighbour of node ``i``, or ``i``
itself (the node opens its own group).  Decoding takes the connected
components of the graph formed by the ``i -> gene[i]`` links, so every decoded
cluster is connected in the document graph and the number of clusters is
never fixed in advance.  Fitness is weighted modularity.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ClusteringError
from .graph import DocumentGraph
from .partition import Partition


@dataclass(frozen=True)
class GaParams:
    population_size: int = 100
    generations: int = 100
    crossover_rate: float = 0.8
    mutation_rate: float = 0.2
    elitism_fraction: float = 0.1
    target_clusters: int = 3
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("crossover_rate", "mutation_rate", "elitism_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ClusteringError(f"{name} must lie in [0, 1], got {value}")
        if self.population_size < 2:
            raise ClusteringError("population_size must be >= 2")
        if self.generations < 1:
            raise ClusteringError("generations must be >= 1")
        if self.target_clusters < 1:
            raise ClusteringError("target_clusters must be >= 1")

    def as_dict(self) -> dict:
        return asdict(self)


def _neighbor_table(A: np.ndarray, with_self: bool = False) -> tuple[np.ndarray, np.ndarray]:
    n = A.shape[0]
    lists = [np.flatnonzero(A[i]) for i in range(n)]
    lists = [np.append(nb, i) if with_self or not len(nb) else nb for i, nb in enumerate(lists)]
    deg = np.array([len(nb) for nb in lists])
    table = np.zeros((n, deg.max()), dtype=np.intp)
    for i, nb in enumerate(lists):
        table[i, : len(nb)] = nb
    return table, deg


def _random_genes(rng, table, deg, shape) -> np.ndarray:
    pick = (rng.random(shape) * deg).astype(np.intp)
    return table[np.arange(shape[-1]), pick]


def decode(pop: np.ndarray) -> np.ndarray:
    """Component labels (minimum node index per component) for each chromosome."""
    pop = np.atleast_2d(pop)
    P, n = pop.shape
    rows = np.broadcast_to(np.arange(P)[:, None], (P, n))
    lab = np.broadcast_to(np.arange(n), (P, n)).copy()
    while True:
        new = np.minimum(lab, np.take_along_axis(lab, pop, axis=1))
        np.minimum.at(new, (rows, pop), lab)
        if np.array_equal(new, lab):
            return lab
        lab = new


def population_modularity(labels: np.ndarray, B: np.ndarray, two_m: float) -> np.ndarray:
    if two_m == 0:
        return np.zeros(labels.shape[0])
    same = labels[:, :, None] == labels[:, None, :]
    return (same * B).sum(axis=(1, 2)) / two_m


def _ranked_fitness(labels: np.ndarray, q: np.ndarray, min_clusters: int) -> np.ndarray:
    # modularity lies in [-1/2, 1]; any shortfall in cluster count ranks below every feasible chromosome
    k = (labels == np.arange(labels.shape[1])).sum(axis=1)
    return np.where(k >= min_clusters, q, -1.0 - (min_clusters - k))


def cluster_ga(graph: DocumentGraph, params: GaParams, min_clusters: int = 1) -> Partition:
    """Best modularity partition found by the GA (before any merging).

    Chromosomes decoding to fewer than ``min_clusters`` groups rank below all
    others, so a later merge-only refinement always has enough clusters.
    """
    n = len(graph)
    if n == 0:
        raise ClusteringError("empty graph")
    if min_clusters > n:
        raise ClusteringError(f"{n} nodes cannot form {min_clusters} clusters")
    A = graph.adjacency()
    k = A.sum(axis=1)
    two_m = float(k.sum())
    B = A - np.outer(k, k) / two_m if two_m else A
    table, deg = _neighbor_table(A)
    mut_table, mut_deg = _neighbor_table(A, with_self=True)

    rng = np.random.default_rng(params.rng_seed)
    P = params.population_size
    n_elite = min(P, math.ceil(params.elitism_fraction * P)) if params.elitism_fraction > 0 else 0

    def evaluate(pop):
        labels = decode(pop)
        q = population_modularity(labels, B, two_m)
        return _ranked_fitness(labels, q, min_clusters), q

    pop = _random_genes(rng, table, deg, (P, n))
    fit, q = evaluate(pop)
    best_idx = int(np.argmax(fit))
    best, best_fit, best_q = pop[best_idx].copy(), float(fit[best_idx]), float(q[best_idx])

    for _ in range(params.generations):
        order = np.argsort(-fit, kind="stable")
        n_child = P - n_elite
        # binary tournament
        a = rng.integers(0, P, size=(n_child, 2))
        b = rng.integers(0, P, size=(n_child, 2))
        pa = np.where(fit[a[:, 0]] >= fit[a[:, 1]], a[:, 0], a[:, 1])
        pb = np.where(fit[b[:, 0]] >= fit[b[:, 1]], b[:, 0], b[:, 1])
        # uniform crossover
        do_cross = rng.random(n_child) < params.crossover_rate
        mask = (rng.random((n_child, n)) < 0.5) & do_cross[:, None]
        children = np.where(mask, pop[pb], pop[pa])
        # neighbour-preserving mutation
        mut = rng.random((n_child, n)) < params.mutation_rate
        children = np.where(mut, _random_genes(rng, mut_table, mut_deg, (n_child, n)), children)

        pop = np.concatenate([pop[order[:n_elite]], children])
        fit, q = evaluate(pop)
        i = int(np.argmax(fit))
        if fit[i] > best_fit:
            best, best_fit, best_q = pop[i].copy(), float(fit[i]), float(q[i])

    labels = decode(best)[0]
    return Partition.from_labels(
        graph.doc_ids,
        labels.tolist(),
        method="gaicda",
        seed=params.rng_seed,
        params={**params.as_dict(), "min_clusters": min_clusters, "modularity": best_q},
    )
