"""Numba acceleration toggle.

Hot kernels in this package come in two flavours: a numba ``@njit`` build
and a plain NumPy/Python reference build.  The environment variable
``PROMPTCUT_NO_NUMBA=1`` selects the reference path (useful on machines
without a working numba install, and for the kernel benchmark).  Both
paths are required to produce bit-identical results; tests compare them.
"""

import os

_ENV_FLAG = "PROMPTCUT_NO_NUMBA"


def _resolve_enabled() -> bool:
    if os.environ.get(_ENV_FLAG, "").strip().lower() in ("1", "true", "yes"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _resolve_enabled()


def njit(func):
    """``numba.njit(cache=True)`` when acceleration is on, identity otherwise.

    Kernels stay serial on purpose: results must not depend on a parallel
    schedule.
    """
    if not NUMBA_ENABLED:
        return func
    import numba

    return numba.njit(cache=True)(func)
