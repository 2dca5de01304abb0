"""Backend selection for the message-passing detector core.

The per-edge Gaussian update loop is the one hot kernel in this package
that is not already served by BLAS/FFT.  A compiled Cython version is
built at install time; if it is missing (source checkout, failed build) or
``DAFTSIM_PURE_PY`` is set to a non-empty value other than ``0``, the
vectorized numpy twin in :mod:`._mp_numpy` takes over.  Both implement the
identical update schedule, so results agree to roundoff.
"""

import os

from ._mp_numpy import mp_posteriors as _mp_numpy_posteriors

__all__ = ["mp_posteriors", "BACKEND"]

_force_pure = os.environ.get("DAFTSIM_PURE_PY", "") not in ("", "0")

if not _force_pure:
    try:
        from ._core import mp_posteriors

        BACKEND = "cython"
    except ImportError:
        mp_posteriors = _mp_numpy_posteriors
        BACKEND = "numpy"
else:
    mp_posteriors = _mp_numpy_posteriors
    BACKEND = "numpy"
