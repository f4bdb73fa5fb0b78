"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and the environment variable
``MCF_LAB_DISABLE_JIT`` is unset (or ``"0"``).  Both backends stay importable
through :func:`get_backend` so they can be compared directly.
"""

import importlib
import os

from . import _numpy

__all__ = ["BACKEND", "get_backend", "graph_rhs", "polyline_velocity",
           "self_intersects", "point_polyline_distance"]


def _jit_disabled():
    return os.environ.get("MCF_LAB_DISABLE_JIT", "").strip() not in ("", "0")


def get_backend(name: str):
    """Return the kernel module for ``"numba"`` or ``"numpy"``."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        return importlib.import_module(".kernels._numba", "mcf_lab")
    raise ValueError(f"unknown backend {name!r}")


if _jit_disabled():
    _impl, BACKEND = _numpy, "numpy"
else:
    try:
        _impl, BACKEND = get_backend("numba"), "numba"
    except ImportError:
        _impl, BACKEND = _numpy, "numpy"

graph_rhs = _impl.graph_rhs
polyline_velocity = _impl.polyline_velocity
self_intersects = _impl.self_intersects
point_polyline_distance = _impl.point_polyline_distance
