"""Kernel selection: compiled extension when available, else pure Python.

Set GRAPHCORESET_PURE_PYTHON=1 to force the fallback (used by the kernel
equivalence tests and benchmarks/bench_kernels.py).
"""

import os

if os.environ.get("GRAPHCORESET_PURE_PYTHON"):
    from . import _dijkstra_py as _impl

    USING_COMPILED = False
else:
    try:
        from . import _dijkstra as _impl  # type: ignore[attr-defined]

        USING_COMPILED = True
    except ImportError:
        from . import _dijkstra_py as _impl

        USING_COMPILED = False

dijkstra_kernel = _impl.multi_source_dijkstra
