"""End-to-end lane detection: simulate, optionally embed, cluster and score."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .clustering import DbscanParams, Partition, dbscan_pairs, processing_order
from .embedding import LayoutConfig, embed_graph
from .evaluation import mean_nmi, nmi
from .proximity import graph_from_trace
from .similarity import PositionHistory, SimilarityParams, candidate_scores
from .simulation import Scenario, SimParams, SimTrace, run

log = logging.getLogger(__name__)

MODES = ("raw", "embedded")


@dataclass(frozen=True)
class DetectionConfig:
    similarity: SimilarityParams = SimilarityParams()
    epsilons: tuple[float, ...] = (15.0,)
    min_pts: int = 15
    include_self: bool = False
    seed: int = 0
    normalization: str = "sqrt"
    stride: int = 1  # cluster every stride-th timestep from ``window`` on

    def __post_init__(self):
        if self.stride < 1:
            raise ValueError("stride must be at least 1")
        if not self.epsilons:
            raise ValueError("at least one epsilon is required")
        if min(self.epsilons) <= 0:
            raise ValueError("epsilons must be positive")


@dataclass
class DetectionResult:
    epsilons: tuple[float, ...]
    timesteps: list[int]
    nmi: np.ndarray  # (n_epsilons, n_timesteps)
    partitions: dict[float, list[Partition]] = field(default_factory=dict)

    def series(self, epsilon: float) -> dict[int, float]:
        e = self.epsilons.index(epsilon)
        return dict(zip(self.timesteps, self.nmi[e].tolist()))

    def mean(self, epsilon: float) -> float:
        return mean_nmi(self.series(epsilon))

    def means(self) -> dict[float, float]:
        return {eps: self.mean(eps) for eps in self.epsilons}


def iter_partitions(positions: np.ndarray, active: np.ndarray, config: DetectionConfig):
    """Yield ``(t, nodes, partitions)`` for every ``stride``-th timestep from ``window`` on.

    ``partitions`` maps each epsilon to a :class:`Partition` of ``nodes``,
    the nodes with a full history window.  All epsilons at a timestep share
    one processing order and one candidate search.
    """
    sim = config.similarity
    epsilons = tuple(float(e) for e in config.epsilons)
    n_t, n = positions.shape[:2]
    history = PositionHistory(n, sim.window)
    eps_max = max(epsilons)
    for t in range(n_t):
        history.push(positions[t], active[t])
        if t < sim.window or (t - sim.window) % config.stride:
            continue
        nodes = np.flatnonzero(history.full() & np.asarray(active[t], dtype=bool))
        if len(nodes) == 0:
            continue
        window = history.window_array(nodes)
        pi, pj, s = candidate_scores(window, sim, eps_max)
        order = processing_order(len(nodes), config.seed, t)
        parts = {}
        for eps in epsilons:
            keep = s < eps
            params = DbscanParams(eps, config.min_pts, config.seed, config.include_self)
            part = dbscan_pairs(len(nodes), pi[keep], pj[keep], params, t, order)
            part.nodes = nodes
            parts[eps] = part
        yield t, nodes, parts


def detect(positions: np.ndarray, active: np.ndarray, truth: np.ndarray,
           config: DetectionConfig, keep_partitions: bool = False) -> DetectionResult:
    """Cluster every timestep from ``window`` on and score it against ``truth``.

    ``positions`` (T, n, 2) may be simulation or embedded coordinates;
    ``truth`` holds one ground-truth label per node.
    """
    epsilons = tuple(float(e) for e in config.epsilons)
    times: list[int] = []
    scores: list[list[float]] = [[] for _ in epsilons]
    kept: dict[float, list[Partition]] = {e: [] for e in epsilons} if keep_partitions else {}
    for t, nodes, parts in iter_partitions(positions, active, config):
        times.append(t)
        for e, eps in enumerate(epsilons):
            scores[e].append(nmi(parts[eps].labels, truth[nodes], config.normalization))
            if keep_partitions:
                kept[eps].append(parts[eps])
    return DetectionResult(epsilons, times, np.asarray(scores, dtype=np.float64).reshape(len(epsilons), -1),
                           kept)


def coordinates(trace: SimTrace, mode: str = "raw", radius: float = 25.0, seed: int = 0,
                layout: LayoutConfig = LayoutConfig()) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates handed to the similarity stage.

    Raw mode uses the simulated positions directly; embedded mode sees only
    the proximity graph and lays it out.
    """
    if mode == "raw":
        return trace.positions.astype(np.float64), trace.active
    if mode == "embedded":
        graph = graph_from_trace(trace, radius)
        return embed_graph(graph, seed=seed, config=layout)
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def run_pipeline(scenario: Scenario, params: SimParams, config: DetectionConfig, mode: str = "raw",
                 radius: float = 25.0, layout: LayoutConfig = LayoutConfig(),
                 keep_partitions: bool = False) -> tuple[SimTrace, DetectionResult]:
    trace = run(scenario, params)
    log.info("simulated %d walkers for %d timesteps", trace.n_nodes, trace.t_end)
    pos, active = coordinates(trace, mode, radius, params.seed, layout)
    result = detect(pos, active, trace.lanes, config, keep_partitions)
    return trace, result
