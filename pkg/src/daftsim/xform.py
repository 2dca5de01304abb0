"""Discrete chirp transforms: DFT, DAFT and DFnT.

Every transform exists in two forms: a fast path (element-wise chirp
multiply, FFT, element-wise chirp multiply) and an explicit dense-matrix
form used as the testing oracle.  All of them are unitary.

Sign convention
---------------
The quadratic-phase ("chirp") diagonal used throughout is

    ``diag(exp(-2j*pi*c*n**2))  for n = 0 .. N-1``

and the forward DAFT of a vector ``x`` is ``chirp(c2) * FFT(chirp(c1) * x)``
with a unitary (1/sqrt(N)) FFT.  Under this convention the even-length
discrete Fresnel transform coincides with the DAFT at
``c1 = c2 = -1/(2N)`` up to the global phase ``exp(-1j*pi/4)``; that chirp
rate is exposed as :func:`ocdm_chirp_rate`.  (Under the conjugate chirp
convention the same special point sits at ``+1/(2N)``; only the sign of the
convention differs, not the transform.)

The fast path is used for power-of-two sizes; other sizes fall back to the
dense matrix product, which keeps the FFT plumbing trivial and is plenty
for the frame lengths this library targets.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "chirp_phase",
    "dft_matrix",
    "daft_matrix",
    "dfnt_matrix",
    "daft",
    "idaft",
    "dfnt",
    "idfnt",
    "ocdm_chirp_rate",
    "oracle_check",
]

_SQRT_HALF_PI_PHASE = np.exp(-0.25j * np.pi)  # global DFnT phase


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def chirp_phase(c: float, n: int) -> np.ndarray:
    """Quadratic phase vector ``exp(-2j*pi*c*k**2)`` for ``k = 0 .. n-1``.

    Parameters
    ----------
    c : float
        Chirp rate (dimensionless).  ``c = 0`` gives the all-ones vector.
    n : int
        Length of the vector; must be >= 1.

    Returns
    -------
    numpy.ndarray
        Length-``n`` complex vector of unit-modulus entries.
    """
    if n < 1:
        raise ValueError(f"invalid transform size n={n}; must be >= 1")
    k = np.arange(n, dtype=np.float64)
    # reduce the phase argument mod 1 before exp: keeps sin/cos accurate
    # for large k**2
    return np.exp(-2j * np.pi * np.mod(c * k * k, 1.0))


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix with entries ``exp(-2j*pi*m*k/n)/sqrt(n)``."""
    if n < 1:
        raise ValueError(f"invalid transform size n={n}; must be >= 1")
    m = np.arange(n)
    prod = np.mod(np.outer(m, m), n)  # exact integer phase reduction
    return np.exp(-2j * np.pi * prod / n) / np.sqrt(n)


def daft_matrix(n: int, c1: float, c2: float) -> np.ndarray:
    """Dense DAFT matrix ``diag(chirp(c2)) @ DFT @ diag(chirp(c1))``.

    This is the O(n^2) oracle form of :func:`daft`; the inverse transform
    is its conjugate transpose.
    """
    return chirp_phase(c2, n)[:, None] * dft_matrix(n) * chirp_phase(c1, n)[None, :]


def _fresnel_factors(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Pre/post chirp diagonals of the even-length DFnT factorization."""
    if n % 2 != 0:
        raise ValueError(
            f"unsupported transform size n={n}: only even-length DFnT is provided"
        )
    k = np.arange(n)
    quad = np.exp(1j * np.pi * ((k * k) % (2 * n)) / n)  # exp(+j*pi*k^2/n)
    theta1 = _SQRT_HALF_PI_PHASE * quad
    theta2 = quad
    return theta1, theta2


def dfnt_matrix(n: int) -> np.ndarray:
    """Dense discrete Fresnel matrix for even ``n``.

    Entry ``(m, k)`` equals ``exp(-1j*pi/4) * exp(1j*pi*(m-k)**2/n) / sqrt(n)``,
    i.e. the chirp-diagonal factorization ``diag(theta2) @ DFT @ diag(theta1)``
    multiplied out.
    """
    theta1, theta2 = _fresnel_factors(n)
    return theta2[:, None] * dft_matrix(n) * theta1[None, :]


def _as_vector(x, name: str = "x") -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or x.size < 1:
        raise ValueError(f"{name} must be a nonempty 1-D complex vector")
    return x


def daft(x, c1: float, c2: float) -> np.ndarray:
    """Forward DAFT: ``chirp(c2) * FFT(chirp(c1) * x)`` (unitary).

    ``daft(x, 0, 0)`` is the plain unitary DFT.  Power-of-two lengths run
    on the FFT fast path; other lengths use the dense matrix.
    """
    x = _as_vector(x)
    n = x.size
    if _is_pow2(n):
        return chirp_phase(c2, n) * np.fft.fft(chirp_phase(c1, n) * x, norm="ortho")
    return daft_matrix(n, c1, c2) @ x


def idaft(x, c1: float, c2: float) -> np.ndarray:
    """Inverse DAFT, the conjugate transpose of :func:`daft`.

    Maps a vector of transform-domain symbols to time-domain samples;
    ``idaft(daft(x, c1, c2), c1, c2) == x`` up to roundoff.
    """
    x = _as_vector(x)
    n = x.size
    if _is_pow2(n):
        z = np.fft.ifft(np.conj(chirp_phase(c2, n)) * x, norm="ortho")
        return np.conj(chirp_phase(c1, n)) * z
    return daft_matrix(n, c1, c2).conj().T @ x


def dfnt(x) -> np.ndarray:
    """Forward discrete Fresnel transform (even length only)."""
    x = _as_vector(x)
    n = x.size
    theta1, theta2 = _fresnel_factors(n)
    if _is_pow2(n):
        return theta2 * np.fft.fft(theta1 * x, norm="ortho")
    return dfnt_matrix(n) @ x


def idfnt(x) -> np.ndarray:
    """Inverse discrete Fresnel transform (even length only)."""
    x = _as_vector(x)
    n = x.size
    theta1, theta2 = _fresnel_factors(n)
    if _is_pow2(n):
        return np.conj(theta1) * np.fft.ifft(np.conj(theta2) * x, norm="ortho")
    return dfnt_matrix(n).conj().T @ x


def ocdm_chirp_rate(n: int) -> float:
    """Chirp rate at which the DAFT reproduces the even-length DFnT.

    ``daft_matrix(n, ocdm_chirp_rate(n), ocdm_chirp_rate(n))`` equals the
    Fresnel matrix up to the global phase ``exp(1j*pi/4)``.  Note the sign:
    it is tied to this library's ``exp(-2j*pi*c*k**2)`` chirp convention.
    """
    return -1.0 / (2.0 * n)


def _unitarity_defect(m: np.ndarray) -> float:
    n = m.shape[0]
    return float(np.linalg.norm(m.conj().T @ m - np.eye(n)))


def oracle_check(sizes=(4, 16, 64, 256), seed: int = 0) -> list[str]:
    """Cross-check fast transforms against their dense-matrix oracles.

    Runs, for each size: unitarity of the DAFT/DFnT matrices, fast-path
    versus matrix-product agreement on random inputs, round trips, energy
    preservation, and the DFT / Fresnel special points.  Returns a list of
    failure descriptions; an empty list means everything agreed.
    """
    rng = np.random.default_rng(seed)
    failures: list[str] = []

    def check(label: str, value: float, tol: float) -> None:
        if not value <= tol:
            failures.append(f"{label}: defect {value:.3e} > tol {tol:.1e}")

    for n in sizes:
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        c1, c2 = rng.uniform(-1.0, 1.0, size=2)

        a = daft_matrix(n, c1, c2)
        check(f"daft matrix unitary (n={n})", _unitarity_defect(a), 1e-10)
        check(
            f"daft fast==matrix (n={n})",
            float(np.linalg.norm(daft(x, c1, c2) - a @ x)),
            1e-9,
        )
        check(
            f"idaft fast==matrix (n={n})",
            float(np.linalg.norm(idaft(x, c1, c2) - a.conj().T @ x)),
            1e-9,
        )
        check(
            f"daft round trip (n={n})",
            float(np.linalg.norm(daft(idaft(x, c1, c2), c1, c2) - x)),
            1e-10,
        )
        check(
            f"daft(0,0) == dft (n={n})",
            float(np.linalg.norm(daft(x, 0.0, 0.0) - dft_matrix(n) @ x)),
            1e-12,
        )
        check(
            f"parseval (n={n})",
            abs(np.linalg.norm(daft(x, c1, c2)) - np.linalg.norm(x)),
            1e-10,
        )
        if n % 2 == 0:
            phi = dfnt_matrix(n)
            check(f"dfnt matrix unitary (n={n})", _unitarity_defect(phi), 1e-10)
            check(
                f"dfnt fast==matrix (n={n})",
                float(np.linalg.norm(dfnt(x) - phi @ x)),
                1e-9,
            )
            check(
                f"dfnt round trip (n={n})",
                float(np.linalg.norm(dfnt(idfnt(x)) - x)),
                1e-10,
            )
            c = ocdm_chirp_rate(n)
            check(
                f"dfnt == phase * daft at ocdm point (n={n})",
                float(
                    np.max(np.abs(phi - _SQRT_HALF_PI_PHASE * daft_matrix(n, c, c)))
                ),
                1e-10,
            )
    return failures
