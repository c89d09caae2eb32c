"""Normalized mutual information between partitions."""

from __future__ import annotations

import math

import numpy as np

NORMALIZATIONS = ("sqrt", "max", "arithmetic")


def contingency(a, b) -> np.ndarray:
    _, ia = np.unique(np.asarray(a), return_inverse=True)
    _, ib = np.unique(np.asarray(b), return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia.ravel(), ib.ravel()), 1)
    return table


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return -math.fsum((p * np.log(p)).tolist())


def nmi(a, b, normalization: str = "sqrt") -> float:
    """NMI of two labelings of the same nodes, in [0, 1].

    ``a`` and ``b`` are label sequences aligned by node, or dicts keyed by
    node.  Two single-cluster labelings score 1; a single cluster against
    anything else scores 0.
    """
    if isinstance(a, dict) or isinstance(b, dict):
        if not (isinstance(a, dict) and isinstance(b, dict)):
            raise ValueError("pass both labelings as dicts or both as sequences")
        if a.keys() != b.keys():
            raise ValueError("labelings cover different node sets")
        keys = sorted(a)
        a = [a[k] for k in keys]
        b = [b[k] for k in keys]
    if len(a) != len(b):
        raise ValueError(f"labelings have different sizes ({len(a)} vs {len(b)})")
    if len(a) == 0:
        raise ValueError("cannot score an empty labeling")
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    table = contingency(a, b)
    n = int(table.sum())
    ha = _entropy(table.sum(axis=1), n)
    hb = _entropy(table.sum(axis=0), n)
    if ha == 0.0 or hb == 0.0:
        return 1.0 if ha == hb else 0.0
    nz = table > 0
    outer = np.outer(table.sum(axis=1), table.sum(axis=0))
    # fsum is correctly rounded, so the result does not depend on label order
    # or on which labeling comes first
    mi = math.fsum((table[nz] / n * np.log(n * table[nz] / outer[nz])).tolist())
    if normalization == "sqrt":
        denom = math.sqrt(ha * hb)
    elif normalization == "max":
        denom = max(ha, hb)
    else:
        denom = (ha + hb) / 2
    return min(1.0, max(0.0, mi / denom))


def mean_nmi(scores) -> float:
    """Arithmetic mean of per-timestep scores (a dict t -> score or a sequence)."""
    values = list(scores.values()) if isinstance(scores, dict) else list(scores)
    if not values:
        raise ValueError("no timesteps were scored")
    return float(sum(values) / len(values))
