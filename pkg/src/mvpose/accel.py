"""Numba acceleration switch.

Hot kernels (the rasterizer and the duplicate scanner) exist twice: a scalar
kernel compiled with numba and a vectorized pure-numpy twin. Which one runs is
decided per call site via :func:`use_numba`, controlled by the ``MVPOSE_NUMBA``
environment variable:

    MVPOSE_NUMBA=1   force the numba kernels (error if numba is missing)
    MVPOSE_NUMBA=0   force the pure-numpy fallbacks
    unset            numba if importable, numpy otherwise

Both paths are exercised against each other in the test suite and timed
against each other in ``benchmarks/bench_kernels.py``.
"""

import os

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        """No-op stand-in so kernel modules still import without numba."""
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


ENV_FLAG = "MVPOSE_NUMBA"


def use_numba(override=None):
    """Resolve the active backend: True = numba kernel, False = numpy twin."""
    if override is not None:
        return bool(override)
    raw = os.environ.get(ENV_FLAG)
    if raw is None:
        return HAS_NUMBA
    if raw.strip() in ("1", "true", "True", "yes"):
        if not HAS_NUMBA:
            raise RuntimeError(f"{ENV_FLAG}=1 but numba is not importable")
        return True
    return False
