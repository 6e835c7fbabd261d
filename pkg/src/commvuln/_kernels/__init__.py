"""Kernel backend selection: compiled extension with pure-Python fallback.

The compiled lane (`_speedups`, Cython) and the pure lane (`pure`) implement
the same functions with identical semantics; set COMMVULN_PURE_PYTHON=1 to
force the fallback (used by the benchmark and the lane-equivalence tests).
"""
from __future__ import annotations

import os
import warnings


def _pick():
    if os.environ.get("COMMVULN_PURE_PYTHON", "").strip().lower() in {"1", "true", "yes"}:
        from . import pure

        return pure, False
    try:
        from . import _speedups

        return _speedups, True
    except ImportError as exc:
        warnings.warn(
            f"commvuln: compiled kernels unavailable ({exc}); using the pure-Python fallback",
            RuntimeWarning,
            stacklevel=2,
        )
        from . import pure

        return pure, False


_backend, HAVE_SPEEDUPS = _pick()
BACKEND = _backend.BACKEND

local_move = _backend.local_move
louvain = _backend.louvain
bfs_distances = _backend.bfs_distances
bfs_stats = _backend.bfs_stats
brandes_betweenness = _backend.brandes_betweenness
triangle_counts = _backend.triangle_counts
induced_csr = _backend.induced_csr
