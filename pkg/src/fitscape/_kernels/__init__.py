"""Hot scan/walk kernels with a compiled core and a NumPy fallback.

The compiled extension (fitscape._kernels._scan) is used when it imported
cleanly; otherwise numpy_backend takes over. Both produce bit-identical
outputs, so everything downstream is backend-independent.
"""

from __future__ import annotations

from . import numpy_backend
from .numpy_backend import CLS_IMPROVABLE, CLS_OPTIMUM, CLS_PLATEAU, splitmix64

try:
    from . import _scan as _compiled
except ImportError:  # missing or failed optional build
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "numpy"

_active = _compiled if _compiled is not None else numpy_backend

scan_best = _active.scan_best
scan_first = _active.scan_first
walk_paths = _active.walk_paths


def get_backend(name):
    """Return the kernel module for an explicit backend name.

    Used by the benchmark and the equivalence tests; everything else goes
    through the module-level functions.
    """
    if name == "numpy":
        return numpy_backend
    if name == "compiled":
        if _compiled is None:
            raise ValueError("compiled backend is not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    out = ["numpy"]
    if _compiled is not None:
        out.insert(0, "compiled")
    return out


__all__ = [
    "BACKEND",
    "CLS_IMPROVABLE",
    "CLS_OPTIMUM",
    "CLS_PLATEAU",
    "available_backends",
    "get_backend",
    "scan_best",
    "scan_first",
    "walk_paths",
    "splitmix64",
]
