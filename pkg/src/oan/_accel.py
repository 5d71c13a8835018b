"""Optional numba acceleration.

Kernels are written in the numba-compatible subset of numpy so the same
source runs either jitted or as plain Python. Set ``OAN_NO_NUMBA=1`` to force
the pure-Python path (useful for debugging and for the benchmark).
"""

import os

USE_NUMBA = os.environ.get("OAN_NO_NUMBA", "").lower() not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def jit(func):
    """Compile ``func`` with ``numba.njit`` when acceleration is enabled."""
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    return func
