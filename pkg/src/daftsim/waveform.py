"""Unified chirp-multicarrier modulator/demodulator.

One parameterization ``(N, c1, c2)`` covers OFDM, OCDM and custom AFDM
waveforms.  The chirp slope ``k = 2*N*c1`` is the slope of each
subcarrier's instantaneous frequency in the time-frequency plane and is the
single knob that distinguishes the classic waveforms:

=========  ==========  ====================================  ===
waveform   c1          c2                                    k
=========  ==========  ====================================  ===
OFDM       0           0                                     0
OCDM       1/(2N)      -1/(2N)                               1
AFDM       k/(2N)      default 1/(4N^2), freely overridable  2*N*c1
=========  ==========  ====================================  ===

The OCDM column reflects this library's chirp sign convention (see
:mod:`daftsim.xform`): the Fresnel-transform point of the DAFT family sits
at chirp rate ``-1/(2N)``, which is what the ``c2`` entry records, while
``c1 = +1/(2N)`` keeps the slope-one convention ``k = 1``.

Frames carry a chirp-periodic prefix: a guard copy of the frame tail whose
samples pick up the quadratic phase the chirp accumulates across one frame
period.  With ``c1 = 0`` it degenerates to the ordinary cyclic prefix, so
one prefix code path serves all three waveforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .xform import daft, idaft

__all__ = [
    "WaveformParams",
    "Frame",
    "params_from_slope",
    "afdm_c1_rule",
    "representation_condition",
    "default_c2",
    "modulate",
    "demodulate",
    "add_cpp",
]


@dataclass(frozen=True)
class WaveformParams:
    """Chirp-multicarrier parameter set.

    Attributes
    ----------
    n : int
        Number of subcarriers (frame length in samples).
    c1 : float
        Time-domain chirp rate; fixes the subcarrier slope ``k = 2*n*c1``.
    c2 : float
        Transform-domain chirp rate; does not move subcarriers in the
        time-frequency plane.
    """

    n: int
    c1: float
    c2: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"subcarrier count must be >= 1, got {self.n}")

    @property
    def k(self) -> float:
        """Chirp slope ``2*n*c1`` (recomputed, never stored)."""
        return 2.0 * self.n * self.c1

    @property
    def label(self) -> str:
        """Cosmetic waveform name; behavior flows from ``(n, c1, c2)`` only."""
        if self.c1 == 0.0 and self.c2 == 0.0:
            return "OFDM"
        if math.isclose(self.k, 1.0, rel_tol=0.0, abs_tol=1e-12):
            return "OCDM"
        return "AFDM"


def default_c2(n: int) -> float:
    """Default transform-domain chirp rate, ``1/(4*n**2)``.

    A deterministic rational that is well below ``1/(2n)``, the scale at
    which ``c2`` would start aliasing the quadratic phase.  Freely
    overridable; BER is insensitive to it because ``c2`` enters the
    effective channel only as a diagonal unitary congruence.
    """
    return 1.0 / (4.0 * n * n)


def params_from_slope(k: float, n: int, c2: float | None = None) -> WaveformParams:
    """Build :class:`WaveformParams` from a chirp slope.

    ``k = 0`` selects OFDM (``c2 = 0``), ``k = 1`` selects OCDM
    (``c2 = -1/(2n)``, the Fresnel point of this library's sign
    convention), any other slope selects an AFDM waveform with
    ``c2 = default_c2(n)``.  Pass ``c2`` to override the policy.

    Parameters
    ----------
    k : float
        Chirp slope; any real value is accepted.
    n : int
        Subcarrier count, >= 2.
    c2 : float, optional
        Explicit transform-domain chirp rate.
    """
    if n < 2:
        raise ValueError(f"subcarrier count must be >= 2, got {n}")
    c1 = k / (2.0 * n)
    if c2 is None:
        if k == 0:
            c2 = 0.0
        elif k == 1:
            c2 = -1.0 / (2.0 * n)
        else:
            c2 = default_c2(n)
    return WaveformParams(n=n, c1=c1, c2=float(c2))


def afdm_c1_rule(alpha_max: int, n: int) -> float:
    """Delay-Doppler separating chirp rate ``(2*alpha_max + 1) / (2*n)``.

    With this ``c1`` (and integer Dopplers bounded by ``alpha_max``), each
    channel path lands on its own cyclic diagonal of the effective channel
    matrix, provided :func:`representation_condition` holds.
    """
    if n < 1:
        raise ValueError(f"subcarrier count must be >= 1, got {n}")
    if alpha_max < 0:
        raise ValueError(f"alpha_max must be >= 0, got {alpha_max}")
    return (2.0 * alpha_max + 1.0) / (2.0 * n)


def representation_condition(alpha_max: int, l_max: int, n: int) -> bool:
    """True when a frame can hold a full delay-Doppler spread of the channel.

    Checks ``2*alpha_max*l_max + 2*alpha_max + l_max < n``: the combined
    footprint of all resolvable (delay, Doppler) pairs must fit within the
    ``n`` transform bins for the paths to be separable.
    """
    return 2 * alpha_max * l_max + 2 * alpha_max + l_max < n


def modulate(x, p: WaveformParams) -> np.ndarray:
    """Map transform-domain symbols to time-domain samples (energy preserving)."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (p.n,):
        raise ValueError(f"expected symbol vector of length {p.n}, got shape {x.shape}")
    return idaft(x, p.c1, p.c2)


def demodulate(r, p: WaveformParams) -> np.ndarray:
    """Map received time-domain samples back to the transform domain.

    Exact inverse of :func:`modulate` on clean signals; a linear unitary
    operator, so white noise stays white with unchanged covariance.
    """
    r = np.asarray(r, dtype=np.complex128)
    if r.shape != (p.n,):
        raise ValueError(f"expected sample vector of length {p.n}, got shape {r.shape}")
    return daft(r, p.c1, p.c2)


@dataclass(frozen=True, eq=False)
class Frame:
    """A modulated frame: guard prefix followed by the payload samples."""

    payload: np.ndarray
    prefix: np.ndarray

    @property
    def l_cpp(self) -> int:
        return self.prefix.size

    @property
    def n(self) -> int:
        return self.payload.size

    def full(self) -> np.ndarray:
        """Concatenated on-air samples, prefix first."""
        return np.concatenate([self.prefix, self.payload])


def cpp_phase(c1: float, n: int, offsets: np.ndarray) -> np.ndarray:
    """Phase factor carried by prefix samples at (negative) frame offsets.

    ``offsets`` are sample indices relative to the payload start (the
    prefix lives at ``-l_cpp .. -1``).  Copying payload sample ``n + m``
    to offset ``m`` multiplies it by ``exp(-2j*pi*c1*(n**2 + 2*n*m))``,
    the quadratic phase a rate-``c1`` chirp gains over one frame period.
    """
    return np.exp(-2j * np.pi * np.mod(c1 * (n * n + 2.0 * n * offsets), 1.0))


def add_cpp(s, l_cpp: int, c1: float) -> Frame:
    """Attach a chirp-periodic prefix of ``l_cpp`` samples to payload ``s``.

    The prefix repeats the last ``l_cpp`` payload samples with the phase
    from :func:`cpp_phase`; with ``c1 = 0`` that phase is exactly 1 and the
    result is a plain cyclic prefix.  ``l_cpp`` may be 0 (empty prefix) and
    must not exceed the payload length.
    """
    s = np.asarray(s, dtype=np.complex128)
    n = s.size
    if not 0 <= l_cpp <= n:
        raise ValueError(f"prefix length {l_cpp} must lie in [0, {n}]")
    offsets = np.arange(-l_cpp, 0, dtype=np.float64)
    prefix = s[n - l_cpp :] * cpp_phase(c1, n, offsets)
    return Frame(payload=s, prefix=prefix)
