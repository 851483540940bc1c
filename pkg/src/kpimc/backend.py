"""Kernel backend selection.

The hot numeric kernels exist in two functionally equivalent variants: a
numba ``@njit`` build and a pure-numpy fallback.  The environment variable
``KPIMC_BACKEND`` picks one at import time:

* ``auto`` (default) - use numba when it imports, numpy otherwise
* ``numba``          - require numba, raise if unavailable
* ``numpy``          - force the vectorized fallback

Uniform draws, resampling indices and CDF inversion are bit-identical
across the two backends (both consume the same PCG64 ``next_double``
stream and use only exactly-rounded arithmetic).  Chains and normal
variates may differ in the last ulp because summation order and libm
calls differ; each backend on its own is fully deterministic per seed.
"""

from __future__ import annotations

import os

_ENV_VAR = "KPIMC_BACKEND"

_requested = os.environ.get(_ENV_VAR, "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"{_ENV_VAR} must be one of 'auto', 'numba', 'numpy' (got {_requested!r})"
    )

if _requested == "numpy":
    NUMBA_ENABLED = False
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        if _requested == "numba":
            raise RuntimeError(f"{_ENV_VAR}=numba but numba is not importable")
        NUMBA_ENABLED = False


def backend_name() -> str:
    """Name of the kernel backend selected at import time."""
    return "numba" if NUMBA_ENABLED else "numpy"
