"""Backend selection for the hot numeric kernels.

Two implementations of each kernel exist: a numba-compiled one and a pure
numpy/python one.  ``CONVPCA_BACKEND=numpy`` forces the fallback path;
anything else (or unset) uses numba when it imports cleanly.  Paths agree
bit-exactly where the source is shared (rasterization) and to float
round-off where the summation order differs (convolutions);
``benchmarks/bench_backends.py`` compares their speed.
"""

import os

_requested = os.environ.get("CONVPCA_BACKEND", "numba").strip().lower()

if _requested not in ("numba", "numpy"):
    raise ValueError(f"CONVPCA_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

USE_NUMBA = _requested == "numba"

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False

BACKEND = "numba" if USE_NUMBA else "numpy"


def maybe_jit(func):
    """Compile ``func`` with numba when enabled, else return it unchanged.

    Used for kernels whose python source already is the exact fallback
    (e.g. Bresenham): one definition, two execution modes.
    """
    if USE_NUMBA:
        return njit(cache=True)(func)
    return func
