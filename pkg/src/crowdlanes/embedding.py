"""Warm-started Fruchterman-Reingold embedding of a temporal proximity graph.

Attraction ``d**2 / k`` acts along edges and repulsion ``k**2 / d`` between
all pairs; each node's move is capped by a temperature.  The first timestep
starts from random positions with linear cooling; later timesteps reuse the
previous positions and run a few iterations at a low constant temperature.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .rng import PortableRNG

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LayoutConfig:
    """Layout constants.  Temperatures, tolerance and cutoff are in units of ``k``."""

    c: float = 1.0
    area_per_node: float = 100.0
    initial_iterations: int = 500
    step_iterations: int = 20
    step_temperature: float = 0.1
    tolerance: float = 1e-3
    repulsion_cutoff: float = 0.0  # 0 keeps exact all-pairs repulsion

    def ideal_length(self, n: int) -> float:
        return self.c * math.sqrt(self.area_per_node * n / max(n, 1))


@dataclass
class EmbeddingState:
    nodes: np.ndarray  # sorted global node indices
    positions: np.ndarray  # (m, 2)
    k: float
    config: LayoutConfig
    iterations: int = 0
    last_force: float = 0.0  # largest net force when the layout run stopped

    @property
    def frame_side(self) -> float:
        return math.sqrt(self.config.area_per_node * max(len(self.nodes), 1))

    def position_map(self) -> dict[int, np.ndarray]:
        return {int(v): p for v, p in zip(self.nodes, self.positions)}


def _local_edges(nodes: np.ndarray, ei, ej) -> tuple[np.ndarray, np.ndarray]:
    ei = np.asarray(ei, dtype=np.int64)
    ej = np.asarray(ej, dtype=np.int64)
    if len(ei) == 0:
        return ei, ej
    li = np.searchsorted(nodes, ei)
    lj = np.searchsorted(nodes, ej)
    ok = (li < len(nodes)) & (lj < len(nodes))
    ok[ok] &= (nodes[li[ok]] == ei[ok]) & (nodes[lj[ok]] == ej[ok])
    if not ok.all():
        raise ValueError("edge endpoint outside the node set")
    return li, lj


def _uniform(rng: PortableRNG, m: int, centre, side: float) -> np.ndarray:
    out = np.empty((m, 2))
    for r in range(m):
        out[r, 0] = centre[0] + (rng.random() - 0.5) * side
        out[r, 1] = centre[1] + (rng.random() - 0.5) * side
    return out


def _layout(state: EmbeddingState, li, lj, temps) -> None:
    cfg = state.config
    cutoff = cfg.repulsion_cutoff * state.k
    done, last = kernels.fr_layout(state.positions, li, lj, state.k, np.asarray(temps, dtype=np.float64),
                                   cfg.tolerance * state.k, cutoff)
    state.iterations = int(done)
    state.last_force = float(last)


def embed_initial(ei, ej, nodes, rng: PortableRNG, config: LayoutConfig = LayoutConfig()) -> EmbeddingState:
    """Random placement in the frame followed by a cooled layout run."""
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    if len(nodes) == 0:
        raise ValueError("cannot embed an empty node set")
    k = config.ideal_length(len(nodes))
    side = math.sqrt(config.area_per_node * len(nodes))
    state = EmbeddingState(nodes, _uniform(rng, len(nodes), (0.0, 0.0), side), k, config)
    li, lj = _local_edges(nodes, ei, ej)
    t0 = side / 10.0
    iters = config.initial_iterations
    temps = t0 * (1.0 - np.arange(iters) / iters)
    _layout(state, li, lj, temps)
    return state


def embed_step(prev: EmbeddingState, ei, ej, nodes, rng: PortableRNG) -> EmbeddingState:
    """Carry positions over to the next timestep's node set and relax briefly.

    Departed nodes are dropped.  A new node starts at the centroid of its
    already-placed neighbours, or uniformly in the frame when it has none.
    """
    cfg = prev.config
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    if len(nodes) == 0:
        return EmbeddingState(nodes, np.zeros((0, 2)), prev.k, cfg)
    pos = np.full((len(nodes), 2), np.nan)
    where = np.searchsorted(prev.nodes, nodes)
    where = np.minimum(where, max(len(prev.nodes) - 1, 0))
    kept = (prev.nodes[where] == nodes) if len(prev.nodes) else np.zeros(len(nodes), bool)
    pos[kept] = prev.positions[where[kept]]
    li, lj = _local_edges(nodes, ei, ej)

    fresh = np.flatnonzero(~kept)
    if len(fresh):
        placed = kept.copy()
        centre = pos[kept].mean(axis=0) if kept.any() else np.zeros(2)
        side = math.sqrt(cfg.area_per_node * len(nodes))
        for v in fresh:
            nbrs = np.concatenate([lj[li == v], li[lj == v]])
            nbrs = nbrs[placed[nbrs]]
            if len(nbrs):
                pos[v] = pos[nbrs].mean(axis=0)
            else:
                pos[v] = _uniform(rng, 1, centre, side)[0]
            placed[v] = True

    state = EmbeddingState(nodes, np.ascontiguousarray(pos), prev.k, cfg)
    _layout(state, li, lj, np.full(cfg.step_iterations, cfg.step_temperature * prev.k))
    return state


def embed_graph(graph, seed: int = 0, config: LayoutConfig = LayoutConfig(),
                progress=None) -> tuple[np.ndarray, np.ndarray]:
    """Embed every timestep of ``graph``.

    Returns ``(positions, active)`` with positions (T, n, 2), NaN where a node
    is absent.  Timesteps before the first non-empty node set stay empty.
    """
    rng = PortableRNG.from_keys(seed, "embed")
    n_t = graph.n_timesteps
    out = np.full((n_t, graph.n_nodes, 2), np.nan)
    active = np.zeros((n_t, graph.n_nodes), dtype=bool)
    state = None
    for t in range(n_t):
        nodes = graph.nodes_at(t)
        ei, ej = graph.edges[t]
        if state is None or len(state.nodes) == 0:
            if len(nodes) == 0:
                continue
            state = embed_initial(ei, ej, nodes, rng, config)
        else:
            state = embed_step(state, ei, ej, nodes, rng)
        out[t, state.nodes] = state.positions
        active[t, state.nodes] = True
        if progress is not None:
            progress(t, state)
    return out, active


def with_overrides(config: LayoutConfig, **kw) -> LayoutConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
