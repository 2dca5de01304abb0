#!/usr/bin/env python3
"""Benchmark the compiled message-passing core against the numpy fallback.

The per-edge Gaussian update loop is the hot kernel of the Monte-Carlo
harness whenever the MP detector is selected; everything else in a frame
is FFT/BLAS-bound.  This script times both backends on effective channel
matrices drawn from the actual fading channel, checks they agree, and also
reports the end-to-end frame rate each backend sustains.

Usage:
    python benchmarks/bench_detectors.py [--sizes 64,128,256] [--reps 20]
"""

import argparse
import time

import numpy as np

from daftsim import channel, detect, waveform
from daftsim._kernels import _mp_numpy

try:
    from daftsim._kernels import _core
except ImportError:
    _core = None


def make_problem(n, seed, mod, snr_db):
    const = detect.constellation(mod)
    spec = channel.ChannelSpec(delays=(0, 1, 2), alpha_max=2.0)
    params = waveform.WaveformParams(
        n, waveform.afdm_c1_rule(2, n), waveform.default_c2(n)
    )
    real = channel.sample_realization(spec, seed)
    h = channel.effective_matrix(real, params).h_eff
    rng = np.random.default_rng(seed + 1)
    x = const.points[rng.integers(0, const.order, n)]
    n0 = 10 ** (-snr_db / 10)
    noise = np.sqrt(n0 / 2) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    y = h @ x + noise
    mag = np.abs(h)
    mask = (mag >= 1e-3 * mag.max()).astype(np.uint8)
    return h, y, n0, const.points, mask


def time_backend(fn, problem, reps):
    h, y, n0, points, mask = problem
    fn(h, y, n0, points, mask, 30, 0.6)  # warm up
    start = time.perf_counter()
    for _ in range(reps):
        out = fn(h, y, n0, points, mask, 30, 0.6)
    return (time.perf_counter() - start) / reps, out


def bench_kernel(sizes, reps, mod, snr_db):
    print(f"message-passing kernel, {mod}, {snr_db:g} dB, 30 iterations")
    print(f"{'n':>5} {'numpy [ms]':>12} {'cython [ms]':>12} {'speedup':>8}")
    for n in sizes:
        problem = make_problem(n, 7 * n, mod, snr_db)
        t_py, out_py = time_backend(_mp_numpy.mp_posteriors, problem, reps)
        if _core is None:
            print(f"{n:>5} {t_py * 1e3:>12.2f} {'not built':>12} {'-':>8}")
            continue
        t_cy, out_cy = time_backend(_core.mp_posteriors, problem, reps)
        agree = np.max(np.abs(out_py[0] - out_cy[0])) < 1e-9
        flag = "" if agree else "  (MISMATCH!)"
        print(
            f"{n:>5} {t_py * 1e3:>12.2f} {t_cy * 1e3:>12.2f} "
            f"{t_py / t_cy:>7.1f}x{flag}"
        )


def bench_frame_rate(n, seconds, mod):
    """End-to-end frames/s for an MP run under each backend."""
    from daftsim.harness import SimConfig, mix64, run_ber

    spec = channel.ChannelSpec(delays=(0, 1, 2), alpha_max=2.0)
    params = waveform.WaveformParams(
        n, waveform.afdm_c1_rule(2, n), waveform.default_c2(n)
    )
    const = detect.constellation(mod)
    bits_per_frame = n * const.bits_per_symbol
    frames = max(10, int(seconds * 1000 / 25))
    cfg = SimConfig(
        params=params,
        modulation=mod,
        detector="mp",
        channel=spec,
        snr_db_list=(15.0,),
        min_bits=frames * bits_per_frame,
        max_frames=frames,
        master_seed=mix64(n),
    )
    import daftsim.detect as detect_mod

    rates = {}
    backends = [("numpy", _mp_numpy.mp_posteriors)]
    if _core is not None:
        backends.append(("cython", _core.mp_posteriors))
    original = detect_mod.mp_posteriors
    try:
        for name, fn in backends:
            detect_mod.mp_posteriors = fn
            start = time.perf_counter()
            run_ber(cfg)
            rates[name] = frames / (time.perf_counter() - start)
    finally:
        detect_mod.mp_posteriors = original
    print(f"\nend-to-end MP harness at n={n} ({frames} frames):")
    for name, rate in rates.items():
        print(f"  {name:>7}: {rate:7.1f} frames/s")


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--sizes", default="64,128,256")
    parser.add_argument("--reps", type=int, default=20)
    parser.add_argument("--mod", default="4qam")
    parser.add_argument("--snr-db", type=float, default=15.0)
    parser.add_argument("--frame-seconds", type=float, default=3.0)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    bench_kernel(sizes, args.reps, args.mod, args.snr_db)
    bench_frame_rate(sizes[len(sizes) // 2], args.frame_seconds, args.mod)


if __name__ == "__main__":
    main()
