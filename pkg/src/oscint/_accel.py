"""Numba dispatch shim.

Hot kernels are written once in numpy style and compiled with ``numba.njit``
when available. Setting ``OSCINT_DISABLE_NUMBA=1`` selects the plain numpy
path (useful for debugging and for the benchmark comparison).
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

DISABLE_ENV = "OSCINT_DISABLE_NUMBA"

NUMBA_AVAILABLE = numba is not None
NUMBA_ENABLED = NUMBA_AVAILABLE and os.environ.get(DISABLE_ENV, "0").lower() not in (
    "1",
    "true",
    "yes",
)


def jit_pair(fn):
    """Return ``(selected, jitted, python)`` for a numpy-style kernel.

    ``jitted`` is None when numba is missing.
    """
    jitted = numba.njit(cache=True)(fn) if NUMBA_AVAILABLE else None
    selected = jitted if NUMBA_ENABLED else fn
    return selected, jitted, fn
