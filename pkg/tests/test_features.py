import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from herdpipe.errors import BlockTooShort, EmptySeries
from herdpipe.features import (
    FeatureConfig,
    ParamMode,
    RAW6_SCHEMA,
    STATS24_SCHEMA,
    Window,
    ZScoreStats,
    apply_zscore,
    build_feature_dataset,
    dft,
    fft,
    fft_features,
    fft_schema,
    fit_zscore,
    inverse_zscore,
    read_features_csv,
    rolling_windows,
    window_stats,
    write_features_csv,
)
from herdpipe.ingest import Behavior, LabeledSeries, SampleSeries


def series(values):
    vals = np.asarray(values, dtype=np.float64)
    ts = 1000 + 500 * np.arange(len(vals), dtype=np.int64)
    return SampleSeries(ts, vals)


def labeled(values, labels=None):
    s = series(values)
    if labels is None:
        labels = np.zeros(len(s), dtype=np.uint8)
    return LabeledSeries(s, labels)


class TestZScore:
    def test_constant_channel_flagged(self):
        vals = np.zeros((3, 6))
        vals[:, 0] = 5.0
        stats = fit_zscore(series(vals))
        assert stats.mean[0] == 5.0 and stats.std[0] == 0.0
        assert stats.constant[0]

    def test_two_point_population_std(self):
        vals = np.zeros((2, 6))
        vals[:, 1] = [1.0, 3.0]
        stats = fit_zscore(series(vals))
        # population sigma: sqrt(((1-2)^2 + (3-2)^2)/2) = 1
        assert stats.mean[1] == 2.0 and stats.std[1] == 1.0

    def test_empty_series_rejected(self):
        with pytest.raises(EmptySeries):
            fit_zscore(series(np.zeros((0, 6))))

    def test_center_and_unit_scale(self):
        stats = ZScoreStats(np.full(6, 2.0), np.full(6, 3.0))
        out = apply_zscore(series(np.full((2, 6), 2.0)), stats)
        assert (out.values == 0.0).all()
        out = apply_zscore(series(np.full((2, 6), 5.0)), stats)
        assert (out.values == 1.0).all()

    def test_constant_channels_map_to_zero(self):
        stats = ZScoreStats(np.full(6, 7.0), np.zeros(6))
        out = apply_zscore(series(np.full((4, 6), 7.0)), stats)
        assert (out.values == 0.0).all()

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_moments_after_normalization(self, seed):
        rng = np.random.default_rng(seed)
        vals = rng.normal(size=(rng.integers(2, 200), 6)) * rng.uniform(0.1, 50)
        s = series(vals)
        out = apply_zscore(s, fit_zscore(s))
        assert np.abs(out.values.mean(axis=0)).max() < 1e-9
        assert np.abs(out.values.std(axis=0) - 1.0).max() < 1e-9

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_inverse_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        vals = rng.normal(size=(5, 6)) * 10 + rng.normal(size=6)
        s = series(vals)
        stats = fit_zscore(s)
        back = inverse_zscore(apply_zscore(s, stats), stats)
        assert np.allclose(back.values, vals, rtol=1e-12, atol=1e-12)


class TestRollingWindows:
    def test_window_count_formula(self):
        lab = labeled(np.zeros((20, 6)))
        assert len(rolling_windows(lab, size=10, stride=1)) == 11

    def test_underfull_series_yields_nothing(self):
        assert rolling_windows(labeled(np.zeros((9, 6)))) == []

    def test_stride_spacing(self):
        got = rolling_windows(labeled(np.zeros((40, 6))), size=10, stride=10)
        assert [w.start for w in got] == [0, 10, 20, 30]

    def test_tie_breaks_toward_latest_sample(self):
        labels = [0] * 5 + [2] * 5  # F,F,F,F,F,L,L,L,L,L
        got = rolling_windows(labeled(np.zeros((10, 6)), labels), size=10)
        assert got[0].label is Behavior.LYING

    def test_majority_wins_over_recency(self):
        labels = [1] * 6 + [0] * 4
        got = rolling_windows(labeled(np.zeros((10, 6)), labels), size=10)
        assert got[0].label is Behavior.RUMINATING

    def test_three_way_tie_latest_occurrence(self):
        # 3 feeding, 3 lying, 3 ruminating, 1 feeding: feeding majority (4)
        labels = [0, 0, 0, 2, 2, 2, 1, 1, 1, 0]
        got = rolling_windows(labeled(np.zeros((10, 6)), labels), size=10)
        assert got[0].label is Behavior.FEEDING

    @given(st.lists(st.integers(0, 3), min_size=10, max_size=10))
    @settings(max_examples=100, deadline=None)
    def test_window_label_matches_counting_rule(self, labels):
        got = rolling_windows(labeled(np.zeros((10, 6)), labels), size=10)
        counts = np.bincount(labels, minlength=4)
        top = counts.max()
        # among tied classes, the one whose last occurrence is latest
        best = max(
            (c for c in range(4) if counts[c] == top),
            key=lambda c: max(i for i, v in enumerate(labels) if v == c),
        )
        assert got[0].label.value == best


class TestWindowStats:
    def test_constant_window(self):
        w = Window(0, np.full((10, 6), 3.5), Behavior.OTHERS)
        feats = window_stats(w)
        assert feats.schema == STATS24_SCHEMA
        v = dict(zip(feats.schema, feats.values))
        assert v["min_ax"] == v["max_ax"] == v["mean_ax"] == 3.5
        assert v["std_ax"] == 0.0

    def test_ramp_statistics(self):
        samples = np.zeros((10, 6))
        samples[:, 0] = np.arange(10.0)
        v = dict(zip(STATS24_SCHEMA, window_stats(Window(0, samples, Behavior.OTHERS)).values))
        assert v["min_ax"] == 0.0 and v["max_ax"] == 9.0 and v["mean_ax"] == 4.5
        assert v["std_ax"] == pytest.approx(2.8722813232690143, abs=1e-15)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(0)
        samples = rng.normal(size=(10, 6))
        a = window_stats(Window(0, samples, Behavior.OTHERS)).values
        b = window_stats(Window(0, samples[rng.permutation(10)], Behavior.OTHERS)).values
        # min/max are exactly order-free; mean/std only up to summation rounding
        assert np.allclose(a, b, rtol=1e-12, atol=1e-15)


class TestDft:
    def test_constant_signal(self):
        got = dft(np.ones(4))
        assert np.allclose(got.bins, [4, 0, 0, 0], atol=1e-12)

    def test_impulse(self):
        got = dft(np.array([1.0, 0, 0, 0]))
        assert np.allclose(got.bins, np.ones(4), atol=1e-12)

    def test_four_point_sine(self):
        got = dft(np.array([0.0, 1.0, 0.0, -1.0]))
        expect = np.array([0, -2j, 0, 2j])
        assert np.allclose(got.bins, expect, atol=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(EmptySeries):
            dft(np.array([]))


class TestFft:
    def test_length_one(self):
        got = fft(np.array([3.25]))
        assert got.n == 1 and got.bins[0] == 3.25

    def test_zero_padding_records_original_length(self):
        got = fft(np.arange(5.0))
        assert got.n == 8 and got.orig_n == 5

    @given(st.integers(0, 2**32 - 1), st.integers(1, 1024))
    @settings(max_examples=120, deadline=None)
    def test_matches_dft_oracle(self, seed, n):
        x = np.random.default_rng(seed).uniform(-1e3, 1e3, size=n)
        got = fft(x)
        padded = np.zeros(got.n)
        padded[:n] = x
        want = dft(padded)
        assert np.abs(got.bins - want.bins).max() < 1e-9

    @given(st.integers(0, 2**32 - 1), st.integers(1, 256))
    @settings(max_examples=60, deadline=None)
    def test_conjugate_symmetry_and_parseval(self, seed, n):
        x = np.random.default_rng(seed).normal(size=n)
        got = fft(x)
        sym = np.conj(got.bins[(-np.arange(got.n)) % got.n])
        assert np.abs(got.bins - sym).max() < 1e-9
        lhs = float(np.sum(x * x))
        rhs = float(np.sum(np.abs(got.bins) ** 2) / got.n)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


class TestFftFeatures:
    def test_dominant_frequency_of_pure_tone(self):
        n = 64
        x = np.sin(2 * np.pi * 5 * np.arange(n) / n)
        values = fft_features(x, n_bands=3, rate_hz=2.0)
        v = dict(zip(fft_schema(3), values))
        assert v["fft_domfreq"] == pytest.approx(5 * 2.0 / 64)  # 0.15625 Hz
        assert v["fft_dommag"] == pytest.approx(32.0, rel=1e-9)

    def test_white_noise_band_energies_positive(self):
        x = np.random.default_rng(1).normal(size=64)
        values = fft_features(x, n_bands=3)
        assert np.isfinite(values).all()
        assert (values[2:] > 0).all()

    def test_constant_block_has_no_dominant_tone(self):
        values = fft_features(np.full(64, 2.0), n_bands=3)
        v = dict(zip(fft_schema(3), values))
        assert v["fft_dommag"] == pytest.approx(0.0, abs=1e-9)
        assert np.allclose(values[2:], 0.0, atol=1e-18)

    def test_short_block_rejected(self):
        with pytest.raises(BlockTooShort):
            fft_features(np.zeros(15))

    def test_band_energies_partition_total_power(self):
        x = np.random.default_rng(2).normal(size=64)
        values = fft_features(x, n_bands=4)
        spectrum = fft(x)
        half = np.abs(spectrum.bins[1 : 64 // 2 + 1]) ** 2
        assert values[2:].sum() == pytest.approx(half.sum(), rel=1e-12)


class TestBuildFeatureDataset:
    def test_schema_lengths(self):
        lab = labeled(np.random.default_rng(0).normal(size=(40, 6)))
        raw = build_feature_dataset(lab, ParamMode.RAW6)
        stats = build_feature_dataset(lab, ParamMode.STATS24)
        assert len(raw.schema) == 6 and raw.schema == RAW6_SCHEMA
        assert len(stats.schema) == 24 and stats.schema == STATS24_SCHEMA

    def test_row_count_matches_windows(self):
        lab = labeled(np.zeros((55, 6)))
        cfg = FeatureConfig(window_size=10, stride=3)
        ds = build_feature_dataset(lab, ParamMode.STATS24, cfg)
        assert len(ds) == len(rolling_windows(lab, 10, 3))

    def test_raw6_is_window_channel_means(self):
        rng = np.random.default_rng(3)
        vals = rng.normal(size=(30, 6))
        ds = build_feature_dataset(labeled(vals), ParamMode.RAW6)
        assert np.allclose(ds.values[0], vals[:10].mean(axis=0), atol=1e-12)
        assert np.allclose(ds.values[7], vals[7:17].mean(axis=0), atol=1e-12)

    def test_fft_mode_appends_block_features(self):
        rng = np.random.default_rng(4)
        vals = rng.normal(size=(140, 6))
        cfg = FeatureConfig(window_size=10, stride=10, fft_block=64, n_bands=3)
        ds = build_feature_dataset(labeled(vals), ParamMode.STATS24_FFT, cfg)
        assert ds.schema == STATS24_SCHEMA + fft_schema(3)
        want_block0 = fft_features(vals[0:64, 0], 3)
        want_block1 = fft_features(vals[64:128, 0], 3)
        assert np.allclose(ds.values[0, 24:], want_block0, atol=1e-12)
        # window starting at 70 belongs to the second 64-sample block
        row = [w.start for w in rolling_windows(labeled(vals), 10, 10)].index(70)
        assert np.allclose(ds.values[row, 24:], want_block1, atol=1e-12)

    def test_fft_tail_shorter_than_16_reuses_previous_block(self):
        rng = np.random.default_rng(5)
        vals = rng.normal(size=(74, 6))  # windows at 64 land in a 10-sample tail
        cfg = FeatureConfig(window_size=10, stride=64, fft_block=64, n_bands=3)
        ds = build_feature_dataset(labeled(vals), ParamMode.STATS24_FFT, cfg)
        want = fft_features(vals[0:64, 0], 3)
        assert np.allclose(ds.values[1, 24:], want, atol=1e-12)

    def test_fft_mode_requires_one_full_block(self):
        vals = np.zeros((15, 6))
        with pytest.raises(BlockTooShort):
            build_feature_dataset(
                labeled(vals), ParamMode.STATS24_FFT, FeatureConfig(window_size=10, stride=1)
            )

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_translation_covariance(self, seed):
        rng = np.random.default_rng(seed)
        vals = rng.normal(size=(60, 6))
        labels = rng.integers(0, 4, size=60).astype(np.uint8)
        cfg = FeatureConfig(window_size=10, stride=5)
        full = build_feature_dataset(labeled(vals, labels), ParamMode.STATS24, cfg)
        shifted = build_feature_dataset(
            labeled(vals[5:], labels[5:]), ParamMode.STATS24, cfg
        )
        assert np.array_equal(full.values[1 : 1 + len(shifted)], shifted.values)
        assert np.array_equal(full.labels[1 : 1 + len(shifted)], shifted.labels)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_no_nan_for_finite_input(self, seed):
        rng = np.random.default_rng(seed)
        vals = rng.uniform(-1e6, 1e6, size=(80, 6))
        for mode in ParamMode:
            ds = build_feature_dataset(labeled(vals), mode, FeatureConfig(stride=7))
            assert np.isfinite(ds.values).all()

    def test_empty_input_keeps_schema(self):
        ds = build_feature_dataset(labeled(np.zeros((3, 6))), ParamMode.STATS24)
        assert len(ds) == 0 and ds.schema == STATS24_SCHEMA


class TestFeaturesCsv:
    def test_round_trip_all_modes(self, tmp_path):
        rng = np.random.default_rng(6)
        vals = rng.normal(size=(80, 6))
        labels = rng.integers(0, 4, size=80).astype(np.uint8)
        for mode in ParamMode:
            ds = build_feature_dataset(labeled(vals, labels), mode, FeatureConfig(stride=9))
            path = tmp_path / f"{mode.value}.csv"
            write_features_csv(ds, path)
            back = read_features_csv(path)
            assert back.param_mode == mode
            assert back.schema == ds.schema
            assert np.array_equal(back.values, ds.values)
            assert np.array_equal(back.labels, ds.labels)
