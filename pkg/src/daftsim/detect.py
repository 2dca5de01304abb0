"""Constellations, symbol (de)mapping and detection.

Gray-labeled unit-average-energy constellations plus the two detectors the
simulator exposes: an LMMSE equalizer and an iterative Gaussian
message-passing (MP) detector.

Gray tables (bit-exact, fixed)
------------------------------
``bpsk``     ``0 -> +1``, ``1 -> -1``.

``4qam``     First bit selects the real sign, second bit the imaginary
             sign: ``00 -> (+1+1j)/sqrt(2)``, ``01 -> (+1-1j)/sqrt(2)``,
             ``10 -> (-1+1j)/sqrt(2)``, ``11 -> (-1-1j)/sqrt(2)``.
             ``qpsk`` is an alias for the same table.

``16qam``    Bits ``b0 b1 b2 b3``: ``b0 b1`` Gray-select the real level
             and ``b2 b3`` the imaginary level from
             ``00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3``, scaled by
             ``1/sqrt(10)``.

Point index ``i`` carries the label ``format(i, '0Kb')``; mapping is a
table lookup and demapping is nearest-point with ties broken toward the
lowest point index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ._kernels import mp_posteriors

__all__ = [
    "ConstellationSpec",
    "constellation",
    "qam_map",
    "qam_demap",
    "DetectorConfig",
    "DetectorError",
    "MpInfo",
    "lmmse",
    "mp_detect",
]


class DetectorError(RuntimeError):
    """A detector could not produce an estimate (e.g. singular system)."""


@dataclass(frozen=True, eq=False)
class ConstellationSpec:
    """A fixed constellation: points indexed by their Gray label value."""

    name: str
    points: np.ndarray
    labels: tuple

    @property
    def order(self) -> int:
        return self.points.size

    @property
    def bits_per_symbol(self) -> int:
        return self.order.bit_length() - 1


_GRAY_LEVELS_4 = {0b00: -3.0, 0b01: -1.0, 0b11: 1.0, 0b10: 3.0}


def _build(name: str) -> ConstellationSpec:
    if name == "bpsk":
        points = np.array([1.0 + 0j, -1.0 + 0j])
    elif name in ("qpsk", "4qam"):
        scale = 1.0 / np.sqrt(2.0)
        points = np.array(
            [
                scale * (1 + 1j),   # 00
                scale * (1 - 1j),   # 01
                scale * (-1 + 1j),  # 10
                scale * (-1 - 1j),  # 11
            ]
        )
    elif name == "16qam":
        scale = 1.0 / np.sqrt(10.0)
        points = np.empty(16, dtype=np.complex128)
        for idx in range(16):
            re = _GRAY_LEVELS_4[(idx >> 2) & 0b11]
            im = _GRAY_LEVELS_4[idx & 0b11]
            points[idx] = scale * (re + 1j * im)
    else:
        raise ValueError(f"unknown constellation {name!r}")
    points.setflags(write=False)
    bits = points.size.bit_length() - 1
    labels = tuple(format(i, f"0{bits}b") for i in range(points.size))
    return ConstellationSpec(name=name, points=points, labels=labels)


_CONSTELLATIONS = {name: _build(name) for name in ("bpsk", "qpsk", "4qam", "16qam")}


def constellation(name: str) -> ConstellationSpec:
    """Look up one of the fixed constellations: bpsk, qpsk, 4qam, 16qam."""
    try:
        return _CONSTELLATIONS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown constellation {name!r}") from None


def qam_map(bits, c: ConstellationSpec) -> np.ndarray:
    """Map a 0/1 bit vector to constellation symbols.

    The bit count must be a multiple of the constellation's bits per
    symbol; each group indexes the Gray table directly.
    """
    bits = np.asarray(bits, dtype=np.int64)
    bps = c.bits_per_symbol
    if bits.size % bps != 0:
        raise ValueError(
            f"bit count {bits.size} is not a multiple of {bps} ({c.name})"
        )
    groups = bits.reshape(-1, bps)
    weights = 1 << np.arange(bps - 1, -1, -1)
    return c.points[groups @ weights]


def qam_demap(symbols, c: ConstellationSpec) -> np.ndarray:
    """Hard-demap symbols to bits by nearest constellation point.

    Exact distance ties resolve to the lowest point index.
    """
    symbols = np.asarray(symbols, dtype=np.complex128)
    diff = symbols[:, None] - c.points[None, :]
    idx = np.argmin(diff.real * diff.real + diff.imag * diff.imag, axis=1)
    bps = c.bits_per_symbol
    shifts = np.arange(bps - 1, -1, -1)
    return ((idx[:, None] >> shifts[None, :]) & 1).reshape(-1).astype(np.int64)


@dataclass(frozen=True)
class DetectorConfig:
    """Detector selection and knobs.

    ``n0`` is the true noise variance (ideal noise knowledge).  The MP
    knobs: ``mp_iters`` caps the message-passing iterations, ``mp_damping``
    blends each probability update with the previous one, and ``mp_prune``
    drops graph edges whose channel entry is below that fraction of the
    largest entry.
    """

    kind: str
    n0: float
    mp_iters: int = 30
    mp_damping: float = 0.6
    mp_prune: float = 1e-3

    def __post_init__(self):
        if self.kind not in ("lmmse", "mp"):
            raise ValueError(f"unknown detector kind {self.kind!r}")
        if self.n0 < 0:
            raise ValueError(f"n0 must be >= 0, got {self.n0}")
        if self.mp_iters < 1:
            raise ValueError(f"mp_iters must be >= 1, got {self.mp_iters}")
        if not 0.0 < self.mp_damping <= 1.0:
            raise ValueError(f"mp_damping must be in (0, 1], got {self.mp_damping}")
        if not 0.0 <= self.mp_prune < 1.0:
            raise ValueError(f"mp_prune must be in [0, 1), got {self.mp_prune}")


# relative pivot tolerance of the LMMSE Cholesky factor
_LMMSE_PIVOT_TOL = 1e-12


def lmmse(y, h_eff, n0: float) -> np.ndarray:
    """LMMSE symbol estimate ``H^H (H H^H + n0 I)^{-1} y``.

    Solved through a Cholesky factorization of the Hermitian system, never
    by explicit inversion.  A factorization failure (singular system at
    ``n0 = 0`` with rank-deficient ``h_eff``) raises
    :class:`DetectorError`; nothing is silently regularized.
    """
    h_eff = np.asarray(h_eff, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    gram = h_eff @ h_eff.conj().T
    gram[np.diag_indices_from(gram)] += n0
    try:
        factor = cho_factor(gram, lower=True, check_finite=False)
    except LinAlgError as exc:
        raise DetectorError(f"LMMSE system not positive definite: {exc}") from exc
    pivots = np.abs(np.diag(factor[0]))
    if (pivots.min() / pivots.max()) ** 2 < _LMMSE_PIVOT_TOL:
        raise DetectorError(
            f"LMMSE pivot ratio below {_LMMSE_PIVOT_TOL:g}; system effectively singular"
        )
    return h_eff.conj().T @ cho_solve(factor, y, check_finite=False)


@dataclass(frozen=True)
class MpInfo:
    """Outcome of one message-passing run."""

    converged: bool
    iterations: int


def mp_detect(y, h_eff, cfg: DetectorConfig, c: ConstellationSpec, return_info: bool = False):
    """Gaussian message-passing detection; returns hard symbol decisions.

    Observation rows and symbol columns form a bipartite graph over the
    edges that survive pruning.  Each observation treats the interference
    from the other symbols on it as Gaussian (accumulated mean and
    variance), each symbol re-weights its point probabilities from the
    extrinsic observation messages, and updates are damped.  The run stops
    at ``cfg.mp_iters`` or as soon as hard decisions are stable across an
    iteration; non-convergence still returns the current decisions, with
    the flag reported via ``return_info``.
    """
    if cfg.kind != "mp":
        raise ValueError(f"mp_detect called with detector kind {cfg.kind!r}")
    h_eff = np.ascontiguousarray(h_eff, dtype=np.complex128)
    y = np.ascontiguousarray(y, dtype=np.complex128)
    magnitude = np.abs(h_eff)
    mask = (magnitude >= cfg.mp_prune * magnitude.max()).astype(np.uint8)
    post, iters, converged = mp_posteriors(
        h_eff, y, cfg.n0, c.points, mask, cfg.mp_iters, cfg.mp_damping
    )
    symbols = c.points[np.argmax(post, axis=1)]
    if return_info:
        return symbols, MpInfo(converged=converged, iterations=iters)
    return symbols
