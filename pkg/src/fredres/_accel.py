"""Numba switch.

Set ``FREDRES_DISABLE_NUMBA=1`` to force the pure-numpy kernels.  The flag is
read once at import time.
"""
import logging
import os

logger = logging.getLogger(__name__)

_disabled = os.environ.get("FREDRES_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not _disabled


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged."""
    if not HAS_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)
