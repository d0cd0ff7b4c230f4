"""Numba switch.

Set ``POLYREP_DISABLE_NUMBA=1`` to force the pure-numpy kernels, e.g. on
platforms without numba or when debugging.
"""
import os

_FLAG = os.environ.get("POLYREP_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(fn):
    """Compile ``fn`` in nopython mode with on-disk caching."""
    if numba is None:  # pragma: no cover
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
