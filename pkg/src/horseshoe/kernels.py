"""Kernel selection: compiled extension when built, numpy otherwise.

Set HORSESHOE_PURE_PYTHON=1 to force the numpy path.
"""

import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("HORSESHOE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

segment_crossings = _impl.segment_crossings
iterate_orbits = _impl.iterate_orbits

__all__ = ["BACKEND", "segment_crossings", "iterate_orbits"]
