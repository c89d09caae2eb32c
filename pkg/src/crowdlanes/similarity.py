"""Windowed position histories and pairwise similarity scores.

Lower scores mean more similar nodes.  All three scores depend only on
differences of positions, so they are unchanged by a rigid motion applied to
the whole window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

SCORES = ("A", "B", "C")


class InsufficientHistory(ValueError):
    """A node has not been active for a full window."""


@dataclass(frozen=True)
class SimilarityParams:
    score: str = "C"
    window: int = 100
    horizon: float = 100.0

    def __post_init__(self):
        if self.score not in SCORES:
            raise ValueError(f"score must be one of {SCORES}, got {self.score!r}")
        if self.window < 1:
            raise ValueError("window must be at least 1")
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")

    @property
    def kind(self) -> int:
        return kernels.SCORE_KINDS[self.score]


class PositionHistory:
    """Ring buffer of the last ``window + 1`` positions of every node."""

    def __init__(self, n_nodes: int, window: int):
        if window < 1:
            raise ValueError("window must be at least 1")
        self.window = window
        self.n_nodes = n_nodes
        self._buf = np.full((window + 1, n_nodes, 2), np.nan)
        self._run = np.zeros(n_nodes, dtype=np.int64)  # consecutive active steps
        self._head = -1
        self.t = -1

    def push(self, positions: np.ndarray, active: np.ndarray) -> None:
        """Record the positions of timestep ``t + 1``; inactive nodes reset their run."""
        active = np.asarray(active, dtype=bool)
        self._head = (self._head + 1) % (self.window + 1)
        frame = np.asarray(positions, dtype=np.float64).copy()
        frame[~active] = np.nan
        self._buf[self._head] = frame
        self._run = np.where(active, self._run + 1, 0)
        self.t += 1

    def history_length(self, i: int) -> int:
        return int(min(self._run[i], self.window + 1))

    def full(self) -> np.ndarray:
        """Mask of nodes with a complete window (velocity defined)."""
        return self._run >= self.window + 1

    def position(self, i: int, lag: int = 0) -> np.ndarray:
        if lag > self.window or lag >= self._run[i]:
            raise InsufficientHistory(f"node {i} has no position {lag} steps back")
        return self._buf[(self._head - lag) % (self.window + 1), i]

    def window_array(self, nodes=None) -> np.ndarray:
        """Positions ordered oldest to newest, shape (window + 1, m, 2)."""
        order = [(self._head - lag) % (self.window + 1) for lag in range(self.window, -1, -1)]
        buf = self._buf[order]
        return buf if nodes is None else buf[:, nodes]

    def _require(self, *nodes: int) -> None:
        for i in nodes:
            if self._run[i] < self.window + 1:
                raise InsufficientHistory(
                    f"node {i} has {self.history_length(i)} of {self.window + 1} positions")


def velocity(h: PositionHistory, i: int) -> np.ndarray:
    """Mean displacement per timestep over the window."""
    h._require(i)
    return (h.position(i, 0) - h.position(i, h.window)) / h.window


def score_a(h: PositionHistory, i: int, j: int) -> float:
    """Largest distance between ``i`` and ``j`` over the window."""
    h._require(i, j)
    win = h.window_array([i, j])
    return float(np.hypot(*(win[:, 0] - win[:, 1]).T).max())


def score_b(h: PositionHistory, i: int, j: int, horizon: float) -> float:
    """Larger of the current distance and the distance after projecting ``horizon`` steps ahead."""
    h._require(i, j)
    now = h.position(i, 0) - h.position(j, 0)
    ahead = now + horizon * (velocity(h, i) - velocity(h, j))
    return float(max(np.hypot(*now), np.hypot(*ahead)))


def score_c(h: PositionHistory, i: int, j: int, horizon: float) -> float:
    """Larger of the current distance and ``horizon`` times the velocity difference."""
    h._require(i, j)
    now = h.position(i, 0) - h.position(j, 0)
    dv = velocity(h, i) - velocity(h, j)
    return float(max(np.hypot(*now), horizon * np.hypot(*dv)))


def score(h: PositionHistory, i: int, j: int, params: SimilarityParams) -> float:
    if params.score == "A":
        return score_a(h, i, j)
    if params.score == "B":
        return score_b(h, i, j, params.horizon)
    return score_c(h, i, j, params.horizon)


def candidate_scores(window: np.ndarray, params: SimilarityParams,
                     max_epsilon: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pairs whose score is below ``max_epsilon``, with their scores.

    Every score is at least the current distance, so candidates come from a
    grid search on the newest positions before the exact score is applied.
    """
    now = np.ascontiguousarray(window[-1])
    pi, pj = kernels.grid_pairs(now, float(max_epsilon))
    if len(pi) == 0:
        return pi, pj, np.empty(0)
    s = kernels.pair_scores(window, pi, pj, params.kind, float(params.horizon))
    keep = s < max_epsilon
    return pi[keep], pj[keep], s[keep]


def score_matrix(window: np.ndarray, params: SimilarityParams) -> np.ndarray:
    """Dense m x m score matrix (for small inputs and cross-checks)."""
    m = window.shape[1]
    iu, ju = np.triu_indices(m, k=1)
    s = kernels.pair_scores(window, iu.astype(np.int64), ju.astype(np.int64), params.kind,
                            float(params.horizon))
    out = np.zeros((m, m))
    out[iu, ju] = s
    out[ju, iu] = s
    return out
