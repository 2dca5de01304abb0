"""Acceptance suite: one test per release criterion.

Each test prints a PASS line with the measured numbers once its assertions
hold, so ``pytest tests/test_acceptance.py -v -s`` doubles as the release
report.  Statistical criteria quote the margin in combined standard
errors; every tolerance is fixed here, not tuned at runtime.
"""

import math
import time

import numpy as np
import pytest

from daftsim import cli
from daftsim.channel import (
    ChannelRealization,
    ChannelSpec,
    apply_channel,
    effective_matrix,
    sample_realization,
)
from daftsim.harness import SimConfig, run_ber
from daftsim.waveform import (
    WaveformParams,
    add_cpp,
    afdm_c1_rule,
    default_c2,
    demodulate,
    modulate,
    params_from_slope,
    representation_condition,
)
from daftsim.xform import daft, daft_matrix, dfnt_matrix, idaft, ocdm_chirp_rate

TABLE_CHANNEL = ChannelSpec(delays=(0, 1, 2), alpha_max=2.0)


def standard_error(rec):
    p = max(rec.ber, 1.0 / max(rec.bits, 1))
    return math.sqrt(p * (1 - p) / rec.bits)


def gap_in_sigmas(worse, better):
    se = math.sqrt(standard_error(worse) ** 2 + standard_error(better) ** 2)
    return (worse.ber - better.ber) / se


def test_criterion_1_transform_correctness():
    start = time.time()
    rng = np.random.default_rng(2024)
    for n in (4, 16, 64, 256):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        c1, c2 = rng.uniform(-1, 1, size=2)
        a = daft_matrix(n, c1, c2)
        assert np.linalg.norm(daft(x, c1, c2) - a @ x) < 1e-9
        assert np.linalg.norm(idaft(x, c1, c2) - a.conj().T @ x) < 1e-9
        assert np.linalg.norm(a.conj().T @ a - np.eye(n)) < 1e-10
        phi = dfnt_matrix(n)
        assert np.linalg.norm(phi.conj().T @ phi - np.eye(n)) < 1e-10
        assert np.max(np.abs(daft(x, 0.0, 0.0) - np.fft.fft(x, norm="ortho"))) < 1e-12
    c = ocdm_chirp_rate(8)
    defect = np.max(
        np.abs(dfnt_matrix(8) - np.exp(-0.25j * np.pi) * daft_matrix(8, c, c))
    )
    assert defect < 1e-10
    elapsed = time.time() - start
    assert elapsed < 5.0
    print(
        f"\nPASS criterion 1: transforms match oracles and are unitary "
        f"(fresnel-point defect {defect:.1e}, {elapsed:.1f}s)"
    )


def test_criterion_2_channel_algebra_equivalence():
    start = time.time()
    n = 64
    rng = np.random.default_rng(4096)
    waveforms = [
        params_from_slope(0, n),
        params_from_slope(1, n),
        WaveformParams(n, afdm_c1_rule(2, n), default_c2(n)),
    ]
    worst = 0.0
    for trial in range(50):
        p = waveforms[trial % len(waveforms)]
        real = sample_realization(TABLE_CHANNEL, 9000 + trial)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        frame = add_cpp(modulate(x, p), TABLE_CHANNEL.l_max, p.c1)
        received = apply_channel(frame, real)
        y = demodulate(received[TABLE_CHANNEL.l_max :], p)
        defect = float(np.max(np.abs(y - effective_matrix(real, p).h_eff @ x)))
        worst = max(worst, defect)
    assert worst < 1e-9
    elapsed = time.time() - start
    assert elapsed < 30.0
    print(
        f"\nPASS criterion 2: modulate/channel/demodulate chain equals the "
        f"transform-domain matrix on 50 realizations (worst {worst:.1e}, {elapsed:.1f}s)"
    )


def test_criterion_3_path_separability():
    n, alpha_max, l_max = 64, 2, 2
    assert representation_condition(alpha_max, l_max, n)
    c1 = afdm_c1_rule(alpha_max, n)
    assert c1 == 5 / 128
    # integer Dopplers with one value repeated across different delays
    real = ChannelRealization(
        gains=np.ones(3, dtype=complex),
        delays=np.array([0, 1, 2]),
        dopplers=np.array([1.0, 1.0, -2.0]),
    )

    def supports(params):
        eff = effective_matrix(real, params, keep_per_path=True)
        return [np.abs(m) > 1e-9 for m in eff.per_path]

    sep = supports(WaveformParams(n, c1, default_c2(n)))
    disjoint = all(
        not np.any(sep[i] & sep[j]) for i in range(3) for j in range(i + 1, 3)
    )
    assert disjoint

    flat = supports(WaveformParams(n, 0.0, 0.0))
    overlapping = any(
        np.any(flat[i] & flat[j]) for i in range(3) for j in range(i + 1, 3)
    )
    assert overlapping
    print(
        "\nPASS criterion 3: separating chirp rate gives pairwise-disjoint "
        "path supports; zero chirp rate overlaps"
    )


def test_criterion_4_awgn_sanity():
    start = time.time()
    awgn = ChannelSpec(
        delays=(0,), alpha_max=0.0, doppler_model=(0.0,), gain_model=(1.0,)
    )
    cfg = SimConfig(
        params=params_from_slope(0, 256),
        modulation="4qam",
        detector="lmmse",
        channel=awgn,
        snr_db_list=(4.0, 8.0),
        min_bits=1_000_000,
        max_frames=10**7,
        master_seed=11,
    )
    records = run_ber(cfg, jobs=2)
    lines = []
    for rec in records:
        gamma = 10 ** (rec.snr_db / 10)
        p_theory = 0.5 * math.erfc(math.sqrt(gamma) / math.sqrt(2))
        se = math.sqrt(p_theory * (1 - p_theory) / rec.bits)
        sigmas = abs(rec.ber - p_theory) / se
        assert sigmas < 3.0, (rec.snr_db, rec.ber, p_theory, sigmas)
        lines.append(f"{rec.snr_db:g} dB: {rec.ber:.6f} vs {p_theory:.6f} ({sigmas:.1f} se)")
    elapsed = time.time() - start
    assert elapsed < 120.0
    print(f"\nPASS criterion 4: AWGN closed form held [{'; '.join(lines)}] ({elapsed:.0f}s)")


def _ordering_cfg(params, detector, snr_db_list, min_bits):
    n = params.n
    spec = ChannelSpec(delays=(0, 1, 2), alpha_max=2.0)
    return SimConfig(
        params=params,
        modulation="4qam",
        detector=detector,
        channel=spec,
        snr_db_list=snr_db_list,
        min_bits=min_bits,
        max_frames=10**7,
        master_seed=2026,
    )


def test_criterion_5_waveform_ordering():
    start = time.time()
    n, bits = 128, 1_000_000  # >= the 2e5 floor; extra bits tighten the errors
    results = {}
    for name, params in (
        ("ofdm", params_from_slope(0, n)),
        ("ocdm", params_from_slope(1, n)),
        ("afdm", WaveformParams(n, afdm_c1_rule(2, n), default_c2(n))),
    ):
        (results[name],) = run_ber(
            _ordering_cfg(params, "lmmse", (20.0,), bits), jobs=2
        )
    g1 = gap_in_sigmas(results["ofdm"], results["ocdm"])
    g2 = gap_in_sigmas(results["ocdm"], results["afdm"])
    assert g1 > 3.0, (results["ofdm"].ber, results["ocdm"].ber, g1)
    assert g2 > 3.0, (results["ocdm"].ber, results["afdm"].ber, g2)
    elapsed = time.time() - start
    assert elapsed < 600.0
    print(
        f"\nPASS criterion 5: BER(afdm {results['afdm'].ber:.2e}) < "
        f"BER(ocdm {results['ocdm'].ber:.2e}) < BER(ofdm {results['ofdm'].ber:.2e}), "
        f"gaps {g2:.1f} and {g1:.1f} se ({elapsed:.0f}s)"
    )


def test_criterion_6_detector_ordering():
    start = time.time()
    n, bits = 128, 200_000
    params = WaveformParams(n, afdm_c1_rule(2, n), default_c2(n))
    lines = []
    for snr in (15.0, 20.0):
        (rec_lmmse,) = run_ber(_ordering_cfg(params, "lmmse", (snr,), bits), jobs=2)
        (rec_mp,) = run_ber(_ordering_cfg(params, "mp", (snr,), bits), jobs=2)
        margin = gap_in_sigmas(rec_lmmse, rec_mp)
        assert margin > 3.0, (snr, rec_lmmse.ber, rec_mp.ber, margin)
        lines.append(
            f"{snr:g} dB: mp {rec_mp.ber:.2e} < lmmse {rec_lmmse.ber:.2e} ({margin:.1f} se)"
        )
    elapsed = time.time() - start
    assert elapsed < 900.0
    print(f"\nPASS criterion 6: [{'; '.join(lines)}] ({elapsed:.0f}s)")


SWEEP_ARGS = [
    "sweep",
    "--target", "c1",
    "--grid", "0:1/(4N):1",
    "--snr-db", "20",
    "--n", "64",
    "--mod", "4qam",
    "--detector", "lmmse",
    "--delays", "0,1,2",
    "--alpha-max", "2",
    "--min-bits", "24000",
    "--seed", "101",
]


def test_criterion_7_sweep_machinery(tmp_path):
    start = time.time()
    n = 64
    first, second = tmp_path / "sweep1.csv", tmp_path / "sweep2.csv"
    assert cli.main(SWEEP_ARGS + ["--out", str(first)]) == 0
    assert cli.main(SWEEP_ARGS + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()

    lines = first.read_text().strip().split("\n")
    assert len(lines) - 1 == 4 * n + 1  # grid rows

    cols = lines[0].split(",")
    by_c1 = {}
    for row in lines[1:]:
        parts = row.split(",")
        by_c1[float(parts[cols.index("c1")])] = (
            int(parts[cols.index("bits")]),
            int(parts[cols.index("errors")]),
        )
    rule_c1 = afdm_c1_rule(2, n)
    bits0, err0 = by_c1[0.0]
    bits1, err1 = by_c1[rule_c1]
    ber0, ber1 = err0 / bits0, err1 / bits1
    se = math.sqrt(
        ber0 * (1 - ber0) / bits0 + max(ber1 * (1 - ber1), 1 / bits1) / bits1
    )
    margin = (ber0 - ber1) / se
    assert margin >= 3.0, (ber0, ber1, margin)
    elapsed = time.time() - start
    print(
        f"\nPASS criterion 7: {4*n+1}-point sweep deterministic; separating "
        f"rate {rule_c1:g} beats zero by {margin:.1f} se "
        f"({ber1:.2e} vs {ber0:.2e}) ({elapsed:.0f}s)"
    )


BER_DET_ARGS = [
    "ber",
    "--waveform", "afdm",
    "--n", "64",
    "--mod", "4qam",
    "--detector", "lmmse",
    "--delays", "0,1,2",
    "--alpha-max", "2",
    "--snr", "10:10:20",
    "--min-bits", "20000",
    "--seed", "31",
]


def test_criterion_8_determinism(tmp_path):
    outputs = []
    for tag, jobs in (("a", "1"), ("b", "2"), ("c", "1")):
        path = tmp_path / f"det_{tag}.csv"
        assert cli.main(BER_DET_ARGS + ["--jobs", jobs, "--out", str(path)]) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1], "parallel run differed from serial"
    assert outputs[0] == outputs[2], "repeat run differed"

    mp_args = [a for a in BER_DET_ARGS]
    mp_args[mp_args.index("lmmse")] = "mp"
    mp_args[mp_args.index("--min-bits") + 1] = "4000"
    mp_out = []
    for tag, jobs in (("d", "2"), ("e", "1")):
        path = tmp_path / f"det_{tag}.csv"
        assert cli.main(mp_args + ["--jobs", jobs, "--out", str(path)]) == 0
        mp_out.append(path.read_bytes())
    assert mp_out[0] == mp_out[1]
    print(
        "\nPASS criterion 8: byte-identical CSV across repeats and worker "
        "counts for both detectors"
    )
