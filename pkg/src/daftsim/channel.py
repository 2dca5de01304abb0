"""Doubly dispersive (delay-Doppler) linear time-varying channel.

A channel is described statistically by :class:`ChannelSpec` (path count,
integer delays, maximum normalized Doppler, how gains and Dopplers are
drawn) and realized as one :class:`ChannelRealization` (sampled gains,
delays, Dopplers).  Delays are in sample periods, Dopplers in units of the
subcarrier spacing, so the digital Doppler frequency of a path is
``alpha / N`` cycles per sample for a length-``N`` frame.

Three views of the same channel are provided and are numerically
consistent with each other:

* :func:`apply_channel` — sample-by-sample action on a prefixed frame
  (one-shot transmission, zero history before the frame);
* :func:`time_domain_matrix` — the exact N-by-N matrix acting on the
  payload once the prefix has been stripped;
* :func:`effective_matrix` — the transform-domain matrix, i.e. the
  time-domain matrix conjugated by the waveform's DAFT.

Per-path Doppler phases are applied at the receive sample index counted
from the payload start (prefix samples sit at negative indices); this is
the convention under which the three views agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .waveform import Frame, WaveformParams, cpp_phase
from .xform import daft_matrix

__all__ = [
    "ChannelSpec",
    "ChannelRealization",
    "EffectiveChannel",
    "sample_realization",
    "apply_channel",
    "time_domain_matrix",
    "effective_matrix",
    "alpha_max_from_speed",
]

SPEED_OF_LIGHT = 3.0e8  # m/s, radio-engineering convention


@dataclass(frozen=True)
class ChannelSpec:
    """Statistical description of a multipath LTV channel.

    Attributes
    ----------
    delays : tuple of int
        Normalized path delays in samples, sorted nondecreasing.  The path
        count is ``len(delays)`` and the delay spread is ``max(delays)``.
    alpha_max : float
        Maximum normalized Doppler shift (>= 0).
    doppler_model : str or tuple
        ``"jakes"`` draws ``alpha_max * cos(theta)`` with ``theta`` uniform
        on [-pi, pi]; ``"integer"`` draws integers uniformly from
        [-floor(alpha_max), floor(alpha_max)]; a tuple fixes the per-path
        Dopplers exactly.
    gain_model : str or tuple
        ``"rayleigh"`` draws i.i.d. complex normal gains with variance
        ``1/P`` (unit total mean power); a tuple fixes the gains, e.g.
        ``(1.0,)`` for a deterministic unit-gain AWGN reference channel.
    """

    delays: tuple
    alpha_max: float
    doppler_model: object = "jakes"
    gain_model: object = "rayleigh"

    def __post_init__(self):
        delays = tuple(int(d) for d in self.delays)
        object.__setattr__(self, "delays", delays)
        if len(delays) < 1:
            raise ValueError("channel needs at least one path")
        if any(d < 0 for d in delays):
            raise ValueError(f"delays must be nonnegative, got {delays}")
        if any(a > b for a, b in zip(delays, delays[1:])):
            raise ValueError(f"delays must be sorted nondecreasing, got {delays}")
        if self.alpha_max < 0:
            raise ValueError(f"alpha_max must be >= 0, got {self.alpha_max}")
        for field, models in (
            ("doppler_model", ("jakes", "integer")),
            ("gain_model", ("rayleigh",)),
        ):
            value = getattr(self, field)
            if isinstance(value, str):
                if value not in models:
                    raise ValueError(f"unknown {field} {value!r}")
            else:
                fixed = tuple(value)
                if len(fixed) != len(delays):
                    raise ValueError(
                        f"fixed {field} needs {len(delays)} entries, got {len(fixed)}"
                    )
                object.__setattr__(self, field, fixed)

    @property
    def p(self) -> int:
        return len(self.delays)

    @property
    def l_max(self) -> int:
        return max(self.delays)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One sampled channel instance: per-path gains, delays and Dopplers."""

    gains: np.ndarray
    delays: np.ndarray
    dopplers: np.ndarray

    @property
    def p(self) -> int:
        return self.gains.size

    @property
    def l_max(self) -> int:
        return int(self.delays.max())

    def digital_freqs(self, n: int) -> np.ndarray:
        """Per-path Doppler in cycles per sample for a length-``n`` frame."""
        return self.dopplers / float(n)


def sample_realization(spec: ChannelSpec, seed: int) -> ChannelRealization:
    """Draw one channel realization, deterministically for a given seed.

    Gains are drawn first (2P standard normals for the Rayleigh model),
    then Dopplers, so fixed-gain and random-gain specs with the same seed
    share their Doppler stream.
    """
    rng = np.random.default_rng(seed)
    p = spec.p

    if spec.gain_model == "rayleigh":
        scale = np.sqrt(1.0 / (2.0 * p))
        gains = scale * (rng.standard_normal(p) + 1j * rng.standard_normal(p))
    else:
        gains = np.asarray(spec.gain_model, dtype=np.complex128)

    if spec.doppler_model == "jakes":
        theta = rng.uniform(-np.pi, np.pi, size=p)
        dopplers = spec.alpha_max * np.cos(theta)
    elif spec.doppler_model == "integer":
        bound = int(np.floor(spec.alpha_max))
        dopplers = rng.integers(-bound, bound + 1, size=p).astype(np.float64)
    else:
        dopplers = np.asarray(spec.doppler_model, dtype=np.float64)

    return ChannelRealization(
        gains=gains,
        delays=np.asarray(spec.delays, dtype=np.int64),
        dopplers=dopplers,
    )


def apply_channel(frame: Frame, real: ChannelRealization, n0: float = 0.0, seed=None) -> np.ndarray:
    """Push a prefixed frame through the channel, optionally adding noise.

    Returns the ``n + l_cpp`` received samples.  Each path delays the
    frame by ``l_i`` samples (zero history before the frame) and applies
    its Doppler phase ramp at the receive index; complex white noise of
    variance ``n0`` is added on top when ``n0 > 0``.

    ``seed`` may be an integer or a ``numpy.random.Generator``; it is only
    consumed when noise is actually drawn.
    """
    if real.l_max > frame.l_cpp:
        raise ValueError(
            f"max path delay {real.l_max} exceeds prefix length {frame.l_cpp}"
        )
    x = frame.full()
    n, l_cpp = frame.n, frame.l_cpp
    total = n + l_cpp
    rx_index = np.arange(-l_cpp, n, dtype=np.float64)
    out = np.zeros(total, dtype=np.complex128)
    freqs = real.digital_freqs(n)
    for h, l, f in zip(real.gains, real.delays, freqs):
        shifted = np.zeros(total, dtype=np.complex128)
        if l < total:
            shifted[l:] = x[: total - l]
        out += h * np.exp(-2j * np.pi * f * rx_index) * shifted
    if n0 > 0.0:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        scale = np.sqrt(n0 / 2.0)
        out += scale * (rng.standard_normal(total) + 1j * rng.standard_normal(total))
    return out


def _path_factor(l: int, f: float, c1: float, n: int) -> np.ndarray:
    """Diagonal of one path's circular action on the payload.

    Row ``k`` of the path matrix holds this value in column ``(k - l) mod
    n``: the Doppler ramp at the receive index, times (for the first ``l``
    rows, which wrap through the prefix) the prefix phase of the sample
    they picked up.
    """
    k = np.arange(n, dtype=np.float64)
    diag = np.exp(-2j * np.pi * f * k)
    if l > 0:
        wrapped = np.arange(l, dtype=np.float64)
        diag[:l] *= cpp_phase(c1, n, wrapped - l)
    return diag


def time_domain_matrix(real: ChannelRealization, p: WaveformParams) -> np.ndarray:
    """Exact payload-to-payload channel matrix after prefix stripping.

    Sum over paths of (prefix-phase correction) x (Doppler ramp) x
    (cyclic shift by the path delay).  With ``c1 = 0`` the correction
    vanishes and the static-path case reduces to a circulant.
    """
    n = p.n
    if int(real.delays.max()) >= n:
        raise ValueError("path delays must be smaller than the frame length")
    rows = np.arange(n)
    h = np.zeros((n, n), dtype=np.complex128)
    freqs = real.digital_freqs(n)
    for g, l, f in zip(real.gains, real.delays, freqs):
        h[rows, (rows - l) % n] += g * _path_factor(int(l), f, p.c1, n)
    return h


@dataclass(eq=False)
class EffectiveChannel:
    """Transform-domain channel: ``h_eff`` plus optional per-path pieces.

    When kept, ``per_path[i]`` is path ``i``'s contribution *before* gain
    weighting, so ``h_eff == sum_i gains[i] * per_path[i]``.
    """

    h_eff: np.ndarray
    per_path: list | None = None


@lru_cache(maxsize=32)
def _cached_daft_matrix(n: int, c1: float, c2: float) -> np.ndarray:
    a = daft_matrix(n, c1, c2)
    a.setflags(write=False)
    return a


def effective_matrix(
    real: ChannelRealization, p: WaveformParams, keep_per_path: bool = False
) -> EffectiveChannel:
    """Conjugate the time-domain channel into the waveform's chirp domain.

    Computes ``A @ H @ A^H`` with ``A`` the waveform's DAFT matrix, using
    the P-diagonal sparsity of ``H`` so that only one dense matrix product
    per call (or per path, if ``keep_per_path``) is needed.
    """
    n = p.n
    if int(real.delays.max()) >= n:
        raise ValueError("path delays must be smaller than the frame length")
    a = _cached_daft_matrix(n, p.c1, p.c2)
    ah = a.conj().T
    freqs = real.digital_freqs(n)

    per_path = [] if keep_per_path else None
    acc = np.zeros((n, n), dtype=np.complex128)
    for g, l, f in zip(real.gains, real.delays, freqs):
        factor = _path_factor(int(l), f, p.c1, n)
        rolled = np.roll(ah, int(l), axis=0)  # row k of (shift @ A^H)
        if keep_per_path:
            path_mat = a @ (factor[:, None] * rolled)
            per_path.append(path_mat)
            acc += g * path_mat
        else:
            acc += (g * factor)[:, None] * rolled
    h_eff = acc if keep_per_path else a @ acc
    return EffectiveChannel(h_eff=h_eff, per_path=per_path)


def alpha_max_from_speed(v_max_kmh: float, carrier_hz: float, subcarrier_hz: float) -> float:
    """Normalized maximum Doppler from physical mobility parameters.

    ``alpha_max = (carrier_hz * v/c) / subcarrier_hz`` with ``v`` converted
    from km/h.  E.g. 540 km/h at a 4 GHz carrier and 1 kHz subcarrier
    spacing gives ``alpha_max = 2``.
    """
    v_ms = v_max_kmh / 3.6
    doppler_hz = carrier_hz * v_ms / SPEED_OF_LIGHT
    return doppler_hz / subcarrier_hz
