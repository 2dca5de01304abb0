import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from daftsim.detect import (
    DetectorConfig,
    DetectorError,
    constellation,
    lmmse,
    mp_detect,
    qam_demap,
    qam_map,
)

ALL_NAMES = ("bpsk", "qpsk", "4qam", "16qam")


class TestConstellations:
    @pytest.mark.parametrize("name", ALL_NAMES)
    def test_unit_average_energy(self, name):
        c = constellation(name)
        assert abs(np.mean(np.abs(c.points) ** 2) - 1.0) < 1e-12

    @pytest.mark.parametrize("name", ALL_NAMES)
    def test_labels_form_gray_code(self, name):
        # points at minimal Euclidean distance must differ in exactly one bit
        c = constellation(name)
        pts = c.points
        dists = np.abs(pts[:, None] - pts[None, :])
        dmin = np.min(dists[dists > 1e-12])
        for i in range(c.order):
            for j in range(c.order):
                if i != j and dists[i, j] < dmin + 1e-9:
                    hamming = bin(i ^ j).count("1")
                    assert hamming == 1, (c.labels[i], c.labels[j])

    def test_qpsk_aliases_4qam(self):
        assert np.array_equal(constellation("qpsk").points, constellation("4qam").points)

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            constellation("64qam")


class TestMapping:
    def test_bpsk_convention(self):
        c = constellation("bpsk")
        assert np.array_equal(qam_map([0, 1], c), [1.0, -1.0])

    def test_4qam_first_point(self):
        c = constellation("4qam")
        assert qam_map([0, 0], c)[0] == pytest.approx((1 + 1j) / np.sqrt(2))

    @pytest.mark.parametrize("name", ALL_NAMES)
    def test_every_symbol_round_trips(self, name):
        c = constellation(name)
        bps = c.bits_per_symbol
        bits = np.array(
            [b for i in range(c.order) for b in map(int, format(i, f"0{bps}b"))]
        )
        assert np.array_equal(qam_demap(qam_map(bits, c), c), bits)

    @given(st.binary(min_size=1, max_size=64))
    @settings(max_examples=50, deadline=None)
    def test_random_bit_strings_round_trip(self, raw):
        c = constellation("16qam")
        bits = np.frombuffer(raw, dtype=np.uint8) % 2
        pad = (-bits.size) % c.bits_per_symbol
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)]).astype(np.int64)
        assert np.array_equal(qam_demap(qam_map(bits, c), c), bits)

    def test_indivisible_bit_count_rejected(self):
        with pytest.raises(ValueError):
            qam_map([0, 1, 0], constellation("4qam"))

    def test_demap_within_half_minimum_distance(self):
        c = constellation("16qam")
        dmin = 2 / np.sqrt(10)
        rng = np.random.default_rng(4)
        idx = rng.integers(0, 16, 200)
        wobble = (rng.standard_normal(200) + 1j * rng.standard_normal(200))
        wobble *= 0.49 * dmin / np.abs(wobble)
        noisy = c.points[idx] + wobble
        expect = qam_demap(c.points[idx], c)
        assert np.array_equal(qam_demap(noisy, c), expect)

    def test_exact_tie_resolves_to_lower_index(self):
        c = constellation("16qam")
        midpoint = 0.5 * (c.points[0] + c.points[1])
        bits = qam_demap(np.array([midpoint]), c)
        assert np.array_equal(bits, [0, 0, 0, 0])  # label of the lower index


class TestLmmse:
    def test_identity_channel_scales_by_one_over_one_plus_n0(self):
        y = np.array([1.0 + 1j, -2.0, 0.5j])
        out = lmmse(y, np.eye(3), 0.5)
        assert np.max(np.abs(out - y / 1.5)) < 1e-12
        out0 = lmmse(y, np.eye(3), 0.0)
        assert np.max(np.abs(out0 - y)) < 1e-12

    def test_noiseless_unitary_channel_is_matched_filter(self):
        rng = np.random.default_rng(5)
        q, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
        y = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        assert np.max(np.abs(lmmse(y, q, 0.0) - q.conj().T @ y)) < 1e-10

    def test_noiseless_full_rank_recovery(self):
        rng = np.random.default_rng(6)
        h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        assert np.max(np.abs(lmmse(h @ x, h, 0.0) - x)) < 1e-8

    def test_singular_noiseless_system_raises(self):
        h = np.zeros((3, 3), dtype=complex)
        h[0, 0] = 1.0
        with pytest.raises(DetectorError):
            lmmse(np.ones(3, dtype=complex), h, 0.0)

    def test_zero_forcing_limit_is_continuous(self):
        rng = np.random.default_rng(7)
        h = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        y = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        x0 = lmmse(y, h, 0.0)
        gaps = [np.linalg.norm(lmmse(y, h, n0) - x0) for n0 in (1e-2, 1e-4, 1e-6)]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_common_row_scaling_is_absorbed(self):
        rng = np.random.default_rng(8)
        h = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        y = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        beta = 0.3 - 1.4j
        ref = lmmse(y, h, 0.2)
        scaled = lmmse(beta * y, beta * h, 0.2 * abs(beta) ** 2)
        assert np.max(np.abs(scaled - ref)) < 1e-10


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            DetectorConfig("zf", 0.1)
        with pytest.raises(ValueError):
            DetectorConfig("mp", 0.1, mp_iters=0)
        with pytest.raises(ValueError):
            DetectorConfig("mp", 0.1, mp_damping=0.0)
        with pytest.raises(ValueError):
            DetectorConfig("mp", 0.1, mp_prune=1.0)
        with pytest.raises(ValueError):
            DetectorConfig("mp", -0.1)

    def test_mp_detect_requires_mp_kind(self):
        cfg = DetectorConfig("lmmse", 0.1)
        with pytest.raises(ValueError):
            mp_detect(np.zeros(2, complex), np.eye(2), cfg, constellation("4qam"))


class TestMessagePassing:
    def test_identity_channel_equals_nearest_point_demap(self):
        c = constellation("4qam")
        rng = np.random.default_rng(9)
        y = rng.standard_normal(24) + 1j * rng.standard_normal(24)
        cfg = DetectorConfig("mp", n0=0.2)
        symbols, info = mp_detect(y, np.eye(24), cfg, c, return_info=True)
        assert info.converged
        assert np.array_equal(qam_demap(symbols, c), qam_demap(y, c))

    def test_noiseless_diagonal_distinct_gains_exact(self):
        c = constellation("4qam")
        rng = np.random.default_rng(10)
        d = np.diag(np.array([0.5, 2.0, 1.0 + 1j, -0.7 + 0.2j]))
        x = c.points[rng.integers(0, 4, 4)]
        symbols = mp_detect(d @ x, d, DetectorConfig("mp", n0=0.0), c)
        assert np.max(np.abs(symbols - x)) < 1e-12

    def test_tracks_exhaustive_ml_on_sparse_channels(self):
        # brute-force maximum likelihood over all 4^4 symbol vectors
        c = constellation("4qam")
        all_x = np.array(list(itertools.product(c.points, repeat=4)))
        cfg = DetectorConfig("mp", n0=10 ** (-1.2))
        rng = np.random.default_rng(11)
        trials, mp_errors, ml_errors = 10_000, 0, 0
        scale = np.sqrt(cfg.n0 / 2)
        for _ in range(trials):
            h = np.zeros((4, 4), dtype=complex)
            h[np.arange(4), rng.permutation(4)] += np.exp(2j * np.pi * rng.random(4))
            h[np.arange(4), rng.permutation(4)] += 0.4 * np.exp(2j * np.pi * rng.random(4))
            x = c.points[rng.integers(0, 4, 4)]
            y = h @ x + scale * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
            x_ml = all_x[np.argmin(np.sum(np.abs(y[None, :] - all_x @ h.T) ** 2, axis=1))]
            x_mp = mp_detect(y, h, cfg, c)
            ml_errors += int(np.sum(np.abs(x_ml - x) > 1e-9))
            mp_errors += int(np.sum(np.abs(x_mp - x) > 1e-9))
        ser_gap = (mp_errors - ml_errors) / (4 * trials)
        assert ser_gap <= 0.02

    def test_nonconvergence_is_reported_not_raised(self):
        c = constellation("4qam")
        rng = np.random.default_rng(12)
        h = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        y = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        cfg = DetectorConfig("mp", n0=1e-6, mp_iters=1)
        symbols, info = mp_detect(y, h, cfg, c, return_info=True)
        assert symbols.shape == (6,)
        assert info.iterations == 1
