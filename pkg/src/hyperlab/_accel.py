"""Numba switch.

Set ``HYPERLAB_NO_NUMBA=1`` to force the pure-numpy code paths. When numba is
missing the fallback is selected automatically.
"""
from __future__ import annotations

import os
import warnings

_DISABLED = os.environ.get("HYPERLAB_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False
    _njit = None
    if not _DISABLED:
        warnings.warn("numba could not be imported; falling back to numpy kernels")

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(*args, **kwargs):
    """``numba.njit(cache=True)`` when numba is available, else identity.

    The decorated function is compiled lazily, so importing a module with
    kernels costs nothing when the numpy path is active.
    """
    if not HAVE_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return _njit(*args, **kwargs)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
