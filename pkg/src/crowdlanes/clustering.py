"""DBSCAN over pairwise similarity scores, with noise nodes as singletons."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .rng import PortableRNG


@dataclass(frozen=True)
class DbscanParams:
    """``include_self`` counts a node in its own neighbourhood for the core test."""

    epsilon: float
    min_pts: int = 15
    seed: int = 0
    include_self: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.min_pts < 1:
            raise ValueError("min_pts must be at least 1")


@dataclass
class Partition:
    nodes: np.ndarray
    labels: np.ndarray
    timestep: int = 0
    core: np.ndarray | None = field(default=None, repr=False)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.nodes.tolist(), self.labels.tolist()))

    @property
    def n_clusters(self) -> int:
        return len(np.unique(self.labels))


def epsilon_neighborhood(i, nodes, score_fn, epsilon: float) -> set:
    """Nodes ``j != i`` with ``score_fn(i, j) < epsilon``."""
    return {j for j in nodes if j != i and score_fn(i, j) < epsilon}


def neighbours_csr(m: int, pi: np.ndarray, pj: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric CSR adjacency (self excluded) from pairs ``i < j``."""
    return kernels.csr_from_pairs(m, pi, pj)


def processing_order(m: int, seed: int, timestep: int = 0) -> np.ndarray:
    """Random permutation of ``range(m)`` seeded per (run, timestep)."""
    state = PortableRNG.from_keys(seed, "dbscan", timestep).state_array()
    return kernels.permutation(state, m)


def singleton_labels(raw: np.ndarray) -> np.ndarray:
    """Replace noise (-1) by fresh labels after the cluster labels."""
    labels = raw.copy()
    noise = np.flatnonzero(labels < 0)
    start = labels.max() + 1 if len(labels) and labels.max() >= 0 else 0
    labels[noise] = start + np.arange(len(noise))
    return labels


def dbscan_csr(indptr, indices, min_pts: int, order, include_self: bool = False):
    """Raw DBSCAN on a neighbour structure; returns ``(labels, core)`` with noise -1."""
    return kernels.dbscan(indptr, indices, int(min_pts), bool(include_self), order)


def dbscan_pairs(m: int, pi, pj, params: DbscanParams, timestep: int = 0, order=None) -> Partition:
    """Cluster ``m`` nodes whose ε-neighbour pairs (``i < j``) are given."""
    indptr, indices = neighbours_csr(m, np.asarray(pi, np.int64), np.asarray(pj, np.int64))
    if order is None:
        order = processing_order(m, params.seed, timestep)
    raw, core = dbscan_csr(indptr, indices, params.min_pts, order, params.include_self)
    return Partition(np.arange(m), singleton_labels(raw), timestep, core)


def dbscan(nodes, score, params: DbscanParams, timestep: int = 0) -> Partition:
    """Cluster ``nodes`` under ``score``.

    ``score`` is either a callable ``score(i, j)`` on node values or a
    precomputed symmetric matrix indexed by position in ``nodes``.
    """
    nodes = np.asarray(nodes)
    m = len(nodes)
    if callable(score):
        pi, pj = [], []
        for a in range(m):
            for b in range(a + 1, m):
                if score(nodes[a], nodes[b]) < params.epsilon:
                    pi.append(a)
                    pj.append(b)
        pi = np.asarray(pi, dtype=np.int64)
        pj = np.asarray(pj, dtype=np.int64)
    else:
        mat = np.asarray(score, dtype=np.float64)
        pi, pj = np.nonzero(np.triu(mat < params.epsilon, k=1))
    part = dbscan_pairs(m, pi, pj, params, timestep)
    part.nodes = nodes
    return part
