"""CSV formats and key-value configuration files.

Formats (all with a header row):

* trace: ``t,node_id,x,y,label`` with labels ``R``, ``L0``, ``L1``, ...
* embedded positions: ``t,node_id,x,y``
* partitions: ``t,node_id,cluster_label``
* per-timestep scores: ``t,nmi`` followed by a ``mean,<value>`` row
"""

from __future__ import annotations

import csv
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .simulation import SimTrace, label_name, parse_label


class FormatError(ValueError):
    """A file does not follow the expected layout."""


@contextmanager
def _writer(path):
    """Open ``path`` for writing; ``None`` or ``"-"`` means stdout."""
    if path is None or path == "-":
        yield csv.writer(sys.stdout, lineterminator="\n")
        sys.stdout.flush()
    else:
        with open(path, "w", newline="") as fh:
            yield csv.writer(fh, lineterminator="\n")


def _rows(path, header: list[str]):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or [h.strip() for h in first[:len(header)]] != header:
            raise FormatError(f"{path}: expected header {','.join(header)}")
        for lineno, row in enumerate(reader, start=2):
            if row:
                yield lineno, [c.strip() for c in row]


def write_trace(trace: SimTrace, path) -> None:
    with _writer(path) as writer:
        writer.writerow(["t", "node_id", "x", "y", "label"])
        labels = trace.labels()
        ids = trace.node_ids.tolist()
        for t in range(trace.n_timesteps):
            for i in np.flatnonzero(trace.active[t]).tolist():
                x, y = trace.positions[t, i].tolist()
                writer.writerow([t, ids[i], x, y, labels[i]])


def write_positions(positions: np.ndarray, active: np.ndarray, node_ids, path) -> None:
    """Real-valued positions (e.g. an embedding) in trace layout without labels."""
    with _writer(path) as writer:
        writer.writerow(["t", "node_id", "x", "y"])
        ids = list(node_ids)
        for t in range(positions.shape[0]):
            for i in np.flatnonzero(active[t]).tolist():
                writer.writerow([t, ids[i], repr(float(positions[t, i, 0])), repr(float(positions[t, i, 1]))])


def read_positions(path):
    """Read a trace or embedded-positions CSV.

    Returns ``(node_ids, positions, active, lanes)``; ``positions`` is float
    (T, n, 2) and ``lanes`` is None when the file has no label column.
    """
    with open(path, newline="") as fh:
        header = [h.strip() for h in next(csv.reader(fh), [])]
    has_label = header == ["t", "node_id", "x", "y", "label"]
    if not has_label and header != ["t", "node_id", "x", "y"]:
        raise FormatError(f"{path}: expected header t,node_id,x,y[,label]")
    records = []
    labels: dict[int, int] = {}
    for lineno, row in _rows(path, header):
        if len(row) != len(header):
            raise FormatError(f"{path}:{lineno}: expected {len(header)} fields")
        try:
            t, node = int(row[0]), int(row[1])
            x, y = float(row[2]), float(row[3])
            if has_label:
                lane = parse_label(row[4])
                if labels.setdefault(node, lane) != lane:
                    raise FormatError(f"{path}:{lineno}: node {node} changes label")
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
        records.append((t, node, x, y))
    ids = np.array(sorted({r[1] for r in records}), dtype=np.int64)
    n_t = max((r[0] for r in records), default=-1) + 1
    positions = np.zeros((n_t, len(ids), 2))
    active = np.zeros((n_t, len(ids)), dtype=bool)
    if records:
        arr = np.array(records, dtype=np.float64)
        t_idx = arr[:, 0].astype(np.int64)
        n_idx = np.searchsorted(ids, arr[:, 1].astype(np.int64))
        positions[t_idx, n_idx] = arr[:, 2:4]
        active[t_idx, n_idx] = True
    lanes = np.array([labels[i] for i in ids.tolist()], dtype=np.int32) if has_label else None
    return ids, positions, active, lanes


def read_trace(path) -> SimTrace:
    ids, positions, active, lanes = read_positions(path)
    if lanes is None:
        raise FormatError(f"{path}: trace files need a label column")
    return SimTrace(positions.astype(np.int32), active, lanes, ids)


def write_partitions(records, node_ids, path) -> None:
    """``records`` yields ``(t, Partition)``; partition nodes index ``node_ids``."""
    ids = np.asarray(node_ids)
    with _writer(path) as writer:
        writer.writerow(["t", "node_id", "cluster_label"])
        for t, part in records:
            for node, label in zip(ids[part.nodes].tolist(), part.labels.tolist()):
                writer.writerow([t, node, label])


def read_partitions(path) -> dict[int, dict[int, int]]:
    out: dict[int, dict[int, int]] = {}
    for lineno, row in _rows(path, ["t", "node_id", "cluster_label"]):
        try:
            t, node, label = (int(v) for v in row)
        except ValueError:
            raise FormatError(f"{path}:{lineno}: expected three integers") from None
        out.setdefault(t, {})[node] = label
    return out


def write_scores(series: dict[int, float], path) -> float:
    from .evaluation import mean_nmi

    mean = mean_nmi(series)
    with _writer(path) as writer:
        writer.writerow(["t", "nmi"])
        for t in sorted(series):
            writer.writerow([t, repr(float(series[t]))])
        writer.writerow(["mean", repr(mean)])
    return mean


def read_scores(path) -> tuple[dict[int, float], float | None]:
    series: dict[int, float] = {}
    mean = None
    for lineno, row in _rows(path, ["t", "nmi"]):
        try:
            if row[0] == "mean":
                mean = float(row[1])
            else:
                series[int(row[0])] = float(row[1])
        except (ValueError, IndexError):
            raise FormatError(f"{path}:{lineno}: malformed score row") from None
    return series, mean


def truth_labels(trace: SimTrace) -> dict[int, str]:
    return {int(i): label_name(int(k)) for i, k in zip(trace.node_ids, trace.lanes)}


def read_config(path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment.  Keys use underscores."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out
