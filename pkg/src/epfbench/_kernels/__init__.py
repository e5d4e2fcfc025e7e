"""Kernel dispatch: compiled extension when available, numpy otherwise.

Set EPFBENCH_PURE_PYTHON=1 to force the reference lane (used by the
benchmark script and the cross-lane tests).
"""

import os

if os.environ.get("EPFBENCH_PURE_PYTHON"):
    from ._ref import enet_cd, ets_sse, loess_smooth, svr_smo

    BACKEND = "python"
else:
    try:
        from ._fast import enet_cd, ets_sse, loess_smooth, svr_smo

        BACKEND = "cython"
    except ImportError:
        from ._ref import enet_cd, ets_sse, loess_smooth, svr_smo

        BACKEND = "python"

__all__ = ["BACKEND", "enet_cd", "ets_sse", "loess_smooth", "svr_smo"]
