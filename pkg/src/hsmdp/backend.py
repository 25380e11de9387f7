"""Kernel backend selection: compiled extension if available, numpy fallback.

``HSMDP_BACKEND=c`` or ``HSMDP_BACKEND=py`` forces a choice (``c`` raises if
the extension is missing).  ``HS_MDP_THREADS`` caps worker parallelism for
replication loops.
"""

from __future__ import annotations

import os

import numpy as np

_forced = os.environ.get("HSMDP_BACKEND", "").strip().lower()

if _forced == "py":
    from . import _kernels_py as kernels
elif _forced == "c":
    from . import _kernels as kernels  # type: ignore[no-redef]
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - exercised only on broken builds
        from . import _kernels_py as kernels  # type: ignore[no-redef]

_glx, _glw = np.polynomial.legendre.leggauss(20)
kernels.init_gl(_glx, _glw)

BACKEND = kernels.backend_name


def thread_count() -> int:
    """Worker cap for replication-level parallelism (HS_MDP_THREADS)."""
    raw = os.environ.get("HS_MDP_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            return 1
    return max(1, min(os.cpu_count() or 1, 8))
