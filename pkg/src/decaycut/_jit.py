"""Optional numba acceleration.

Set ``DECAYCUT_DISABLE_NUMBA=1`` to force the pure-numpy kernels, e.g. for
debugging or on platforms without numba.
"""
import os

_disabled = os.environ.get("DECAYCUT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _disabled:
        raise ImportError
    import numba
except ImportError:
    numba = None

NUMBA_ENABLED = numba is not None


def njit(*args, **kws):
    """``numba.njit(cache=True)`` when available, otherwise a no-op decorator."""
    if numba is None:
        if len(args) == 1 and callable(args[0]) and not kws:
            return args[0]
        return lambda func: func
    kws.setdefault("cache", True)
    return numba.njit(*args, **kws)
