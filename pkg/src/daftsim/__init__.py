"""daftsim: chirp-multicarrier link-level simulation.

A small simulation library and CLI for multicarrier waveforms built on the
discrete affine Fourier transform.  One chirp-slope parameter moves
between OFDM, OCDM and AFDM; a doubly dispersive delay-Doppler channel,
LMMSE and message-passing detectors, and a Monte-Carlo BER harness with
parameter sweeps sit on top.
"""

import os as _os

__version__ = "0.1.0"

# The dense work here is many small (<= 256 x 256) BLAS/LAPACK calls per
# simulated frame; multithreaded BLAS loses far more to synchronization
# than it gains at these sizes, and the harness parallelizes across frames
# instead.  Pin BLAS to one thread unless the user overrides.
_blas_threads = _os.environ.get("DAFTSIM_BLAS_THREADS", "1")
_blas_limiter = None
if _blas_threads != "0":
    try:
        from threadpoolctl import threadpool_limits as _threadpool_limits

        _blas_limiter = _threadpool_limits(limits=int(_blas_threads), user_api="blas")
    except Exception:  # pragma: no cover - threadpoolctl missing or odd BLAS
        _blas_limiter = None

from . import channel, detect, harness, waveform, xform  # noqa: E402
from ._kernels import BACKEND as KERNEL_BACKEND  # noqa: E402

__all__ = [
    "xform",
    "waveform",
    "channel",
    "detect",
    "harness",
    "KERNEL_BACKEND",
    "__version__",
]
