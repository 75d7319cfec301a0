"""Accelerator selection.

Hot loops are compiled with numba when it is importable and the
``VORTEXRINGS_DISABLE_NUMBA`` environment variable is unset (or ``0``).
Otherwise the vectorised numpy kernels in :mod:`vortexrings._numpy_kernels`
are used and the scalar helpers run as plain Python.
"""

import os

_flag = os.environ.get("VORTEXRINGS_DISABLE_NUMBA", "0").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError("numba disabled by VORTEXRINGS_DISABLE_NUMBA")
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def deco(fn):
            return fn

        return deco

    prange = range


def backend_name():
    return "numba" if HAVE_NUMBA else "numpy"


def set_threads(n):
    """Set the worker count for parallel kernels (no-op without numba)."""
    if n is None or not HAVE_NUMBA:
        return
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)


def get_threads():
    if not HAVE_NUMBA:
        return 1
    return numba.get_num_threads()
