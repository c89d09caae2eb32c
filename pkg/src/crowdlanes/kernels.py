"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``CROWDLANES_PURE`` is set to a non-empty value other
than ``0``, the pure-Python kernels are used.  Both expose the same functions
with the same semantics and random draw order.
"""

import os

from . import _pykernels as pure

if os.environ.get("CROWDLANES_PURE", "0") not in ("", "0"):
    compiled = None
else:
    try:
        from . import _kernels as compiled
    except ImportError:  # pragma: no cover - depends on the build
        compiled = None

backend = compiled if compiled is not None else pure
BACKEND_NAME = "compiled" if compiled is not None else "python"

sim_step = backend.sim_step
permutation = backend.permutation
grid_pairs = backend.grid_pairs
pair_scores = backend.pair_scores
dbscan = backend.dbscan
fr_layout = backend.fr_layout
closest_point = backend.closest_point
resolve_move = backend.resolve_move
csr_from_pairs = backend.csr_from_pairs

SCORE_KINDS = pure.SCORE_KINDS
