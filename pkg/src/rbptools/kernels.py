"""Kernel selection: compiled extension when importable, else pure Python.

Set ``RBPTOOLS_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("RBPTOOLS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

bfs = _impl.bfs
distance_rows = _impl.distance_rows
component_labels = _impl.component_labels

__all__ = ["BACKEND", "bfs", "distance_rows", "component_labels"]
