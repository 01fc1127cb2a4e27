"""Numba dispatch.

Hot kernels are written once as plain Python over numpy arrays.  When numba
is importable and not disabled, the jitted twin is used instead.  Set
``SUBSERIES_LAB_DISABLE_NUMBA=1`` to force the pure-numpy path.
"""

import os

DISABLE_ENV = "SUBSERIES_LAB_DISABLE_NUMBA"

try:
    from numba import njit as _njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None
    NUMBA_AVAILABLE = False


def numba_disabled() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = NUMBA_AVAILABLE and not numba_disabled()


def jit(fn):
    """Return the nopython-compiled twin of ``fn``, or None without numba."""
    if not NUMBA_AVAILABLE:
        return None
    return _njit(cache=True, nogil=True)(fn)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
