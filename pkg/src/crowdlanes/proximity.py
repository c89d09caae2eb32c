"""Temporal proximity graphs built from walker positions."""

from __future__ import annotations

import csv
import io
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels


class EdgeListError(ValueError):
    """Malformed edge-list file."""


@dataclass
class TemporalProximityGraph:
    """Undirected per-timestep edges over node indices ``0..n-1``.

    ``edges[t]`` is a pair of sorted int64 arrays ``(i, j)`` with ``i < j``.
    ``node_ids`` maps indices to external node identities.  ``active`` (when
    known) marks the nodes present at each timestep, including isolated ones.
    Edges carry no distances.
    """

    node_ids: np.ndarray
    edges: list[tuple[np.ndarray, np.ndarray]]
    active: np.ndarray | None = field(default=None)

    @property
    def n_timesteps(self) -> int:
        return len(self.edges)

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    def nodes_at(self, t: int) -> np.ndarray:
        if self.active is not None:
            return np.flatnonzero(self.active[t])
        i, j = self.edges[t]
        return np.union1d(i, j)

    def edge_count(self, t: int) -> int:
        return len(self.edges[t][0])

    def has_edge(self, t: int, a: int, b: int) -> bool:
        i, j = self.edges[t]
        a, b = min(a, b), max(a, b)
        lo = np.searchsorted(i, a, side="left")
        hi = np.searchsorted(i, a, side="right")
        return bool(np.any(j[lo:hi] == b))

    def triples(self) -> list[tuple[int, int, int]]:
        out = []
        for t, (i, j) in enumerate(self.edges):
            ids_i = self.node_ids[i]
            ids_j = self.node_ids[j]
            out.extend(zip([t] * len(i), ids_i.tolist(), ids_j.tolist()))
        return out

    def __eq__(self, other):
        if not isinstance(other, TemporalProximityGraph):
            return NotImplemented
        return self.triples() == other.triples()


def _brute_pairs(pos: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
    diff = pos[:, None, :] - pos[None, :, :]
    d2 = (diff ** 2).sum(axis=2)
    i, j = np.nonzero(np.triu(d2 < radius * radius, k=1))
    return i.astype(np.int64), j.astype(np.int64)


def build_proximity_graph(positions: np.ndarray, active: np.ndarray, radius: float,
                          node_ids=None, method: str = "grid") -> TemporalProximityGraph:
    """Connect active nodes closer than ``radius`` (strictly) at each timestep.

    ``positions`` is (T+1, n, 2) and ``active`` (T+1, n).  ``method`` is
    ``"grid"`` (uniform bins of side ``radius``) or ``"brute"`` (all pairs);
    both give the same edges.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    positions = np.asarray(positions)
    active = np.asarray(active, dtype=bool)
    n = positions.shape[1]
    edges = []
    for t in range(positions.shape[0]):
        idx = np.flatnonzero(active[t])
        pos = positions[t, idx].astype(np.float64)
        if method == "grid":
            li, lj = kernels.grid_pairs(pos, float(radius))
        elif method == "brute":
            li, lj = _brute_pairs(pos, float(radius))
        else:
            raise ValueError(f"unknown method {method!r}")
        # idx is ascending, so local order carries over to global indices
        edges.append((idx[li].astype(np.int64), idx[lj].astype(np.int64)))
    ids = np.arange(n, dtype=np.int64) if node_ids is None else np.asarray(node_ids, dtype=np.int64)
    return TemporalProximityGraph(ids, edges, active.copy())


def graph_from_trace(trace, radius: float, method: str = "grid") -> TemporalProximityGraph:
    return build_proximity_graph(trace.positions, trace.active, radius, trace.node_ids, method)


def write_edges(graph: TemporalProximityGraph, path) -> None:
    """Write ``t,i,j`` rows sorted by (t, i, j) using external node ids."""
    text = format_edges(graph)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def format_edges(graph: TemporalProximityGraph) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "i", "j"])
    ids = graph.node_ids
    for t, (i, j) in enumerate(graph.edges):
        a = ids[i]
        b = ids[j]
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        order = np.lexsort((hi, lo))
        for x, y in zip(lo[order].tolist(), hi[order].tolist()):
            writer.writerow([t, x, y])
    return buf.getvalue()


def read_edges(path) -> TemporalProximityGraph:
    text = Path(path).read_text()
    return parse_edges(text)


def parse_edges(text: str) -> TemporalProximityGraph:
    rows: list[tuple[int, int, int]] = []
    lines = text.splitlines()
    if not lines or lines[0].strip().replace(" ", "") != "t,i,j":
        raise EdgeListError("line 1: expected header 't,i,j'")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise EdgeListError(f"line {lineno}: expected 3 fields, got {len(parts)}")
        try:
            t, i, j = (int(p) for p in parts)
        except ValueError:
            raise EdgeListError(f"line {lineno}: non-integer field in {line!r}") from None
        if t < 0:
            raise EdgeListError(f"line {lineno}: negative timestep")
        if i == j:
            raise EdgeListError(f"line {lineno}: self-loop on node {i}")
        if i > j:
            raise EdgeListError(f"line {lineno}: expected i < j")
        rows.append((t, i, j))
    if len(set(rows)) != len(rows):
        raise EdgeListError("duplicate edge within a timestep")
    ids = np.array(sorted({v for _, i, j in rows for v in (i, j)}), dtype=np.int64)
    n_t = max((t for t, _, _ in rows), default=-1) + 1
    per_t: list[list[tuple[int, int]]] = [[] for _ in range(n_t)]
    for t, i, j in rows:
        per_t[t].append((int(np.searchsorted(ids, i)), int(np.searchsorted(ids, j))))
    edges = []
    for pairs in per_t:
        pairs.sort()
        if pairs:
            arr = np.asarray(pairs, dtype=np.int64)
            edges.append((arr[:, 0].copy(), arr[:, 1].copy()))
        else:
            edges.append((np.empty(0, np.int64), np.empty(0, np.int64)))
    return TemporalProximityGraph(ids, edges)
