"""Tests for the estrus module: scaling, sequences, LSTM, baseline, files."""

import json
import math
from datetime import date, timedelta

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import herdpipe.estrus as estrus
from herdpipe.errors import (
    CorruptModel,
    DivergedLoss,
    EmptyFit,
    InsufficientHistory,
    ShapeMismatch,
    VersionMismatch,
    ZeroDenominator,
)
from herdpipe.summarize import HourlyRow


def make_rows(others, feeding=0.0, ruminating=0.0, coverage=3600.0,
              start_day=date(2024, 1, 6), start_hour=0):
    """Contiguous hourly rows; scalar or per-row minute values."""
    n = len(others)
    feeding = [feeding] * n if np.isscalar(feeding) else list(feeding)
    ruminating = [ruminating] * n if np.isscalar(ruminating) else list(ruminating)
    coverage = [coverage] * n if np.isscalar(coverage) else list(coverage)
    rows = []
    for k in range(n):
        total = start_hour + k
        rows.append(
            HourlyRow(
                start_day + timedelta(days=total // 24),
                total % 24,
                float(feeding[k]),
                float(ruminating[k]),
                0.0,
                float(others[k]),
                float(coverage[k]),
            )
        )
    return rows


def zero_model(hidden=3, input_size=5, b_out=0.0):
    """All-zero gates: h and C stay 0, so the prediction is exactly b_out."""
    width = hidden + input_size
    return estrus.LstmModel(
        hidden,
        input_size,
        np.zeros((hidden, width)),
        np.zeros((hidden, width)),
        np.zeros((hidden, width)),
        np.zeros((hidden, width)),
        np.zeros(hidden),
        np.zeros(hidden),
        np.zeros(hidden),
        np.zeros(hidden),
        np.zeros(hidden),
        np.array([b_out]),
    )


# ---------------------------------------------------------------------------
# Min-max scaling


class TestMinMaxScaler:
    def test_fit_and_apply(self):
        scaler = estrus.minmax_fit(np.array([[0.0], [60.0]]))
        assert estrus.minmax_apply(scaler, np.array([[30.0]]))[0, 0] == 0.5

    def test_no_clipping_outside_fit_range(self):
        scaler = estrus.minmax_fit(np.array([[0.0], [60.0]]))
        assert estrus.minmax_apply(scaler, np.array([[90.0]]))[0, 0] == 1.5
        assert estrus.minmax_apply(scaler, np.array([[-30.0]]))[0, 0] == -0.5

    def test_inverse_round_trip(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(-10.0, 50.0, (40, 3))
        scaler = estrus.minmax_fit(x)
        back = estrus.minmax_inverse(scaler, estrus.minmax_apply(scaler, x))
        np.testing.assert_allclose(back, x, rtol=1e-12, atol=1e-12)

    def test_constant_column_maps_to_zero(self):
        x = np.array([[5.0, 1.0], [5.0, 3.0]])
        scaler = estrus.minmax_fit(x)
        z = estrus.minmax_apply(scaler, x)
        assert (z[:, 0] == 0.0).all()
        assert list(z[:, 1]) == [0.0, 1.0]
        # inverse recovers the fitted constant
        assert (estrus.minmax_inverse(scaler, z)[:, 0] == 5.0).all()

    def test_one_dimensional_input(self):
        scaler = estrus.MinMaxScaler(np.array([0.0]), np.array([10.0]))
        assert estrus.minmax_apply(scaler, np.array([2.5]))[0] == 0.25

    def test_empty_fit_rejected(self):
        with pytest.raises(EmptyFit):
            estrus.minmax_fit(np.empty((0, 3)))

    def test_inverted_bounds_rejected(self):
        with pytest.raises(ValueError):
            estrus.MinMaxScaler(np.array([1.0]), np.array([0.0]))


# ---------------------------------------------------------------------------
# Sequence construction


class TestMakeSequences:
    def fit_scaler(self, rows):
        return estrus.fit_row_scaler(rows)

    def test_sequence_count(self):
        rows = make_rows(np.linspace(0, 60, 96))
        seqs = estrus.make_sequences(rows, self.fit_scaler(rows), lookback=72)
        assert len(seqs) == 24
        assert seqs.inputs.shape == (24, 72, 5)

    def test_minimum_history_yields_one_sequence(self):
        rows = make_rows(np.arange(73.0))
        seqs = estrus.make_sequences(rows, self.fit_scaler(rows), lookback=72)
        assert len(seqs) == 1
        assert seqs.target_idx[0] == 72

    def test_too_few_rows_rejected(self):
        rows = make_rows(np.arange(72.0))
        with pytest.raises(InsufficientHistory):
            estrus.make_sequences(rows, self.fit_scaler(rows), lookback=72)

    def test_non_chronological_rejected(self):
        rows = make_rows(np.arange(10.0))
        rows[3], rows[4] = rows[4], rows[3]
        with pytest.raises(ValueError):
            estrus.make_sequences(rows, self.fit_scaler(rows), lookback=4)

    def test_feature_layout_and_target(self):
        others = np.arange(10.0) * 6.0
        feeding = np.arange(10.0)
        ruminating = 60.0 - feeding
        rows = make_rows(others, feeding=feeding, ruminating=ruminating,
                         start_hour=5)
        scaler = self.fit_scaler(rows)
        seqs = estrus.make_sequences(rows, scaler, lookback=4)
        scaled = estrus.minmax_apply(scaler, estrus.minute_matrix(rows))
        first = seqs.inputs[0]
        for step in range(4):
            hour = rows[step].hour
            assert first[step, 0] == pytest.approx(math.sin(2 * math.pi * hour / 24))
            assert first[step, 1] == pytest.approx(math.cos(2 * math.pi * hour / 24))
            # scaler column order: ruminating, feeding, others
            assert first[step, 2] == scaled[step, 0]
            assert first[step, 3] == scaled[step, 1]
            assert first[step, 4] == scaled[step, 2]
        np.testing.assert_array_equal(seqs.targets, scaled[4:, 2])
        np.testing.assert_array_equal(seqs.target_idx, np.arange(4, 10))

    def test_low_coverage_hour_masks_windows_touching_it(self):
        coverage = [3600.0] * 10
        coverage[6] = 100.0  # below the half-hour floor
        rows = make_rows(np.arange(10.0), coverage=coverage)
        seqs = estrus.make_sequences(rows, self.fit_scaler(rows), lookback=4)
        # targets 6..9 all have row 6 in their window (or as target)
        assert list(seqs.target_idx) == [4, 5]

    def test_gap_breaks_contiguity(self):
        rows = make_rows(np.arange(6.0))
        later = make_rows(np.arange(6.0), start_hour=8)  # skips hours 6-7
        rows = rows + later
        seqs = estrus.make_sequences(rows, self.fit_scaler(rows), lookback=4)
        # windows spanning the jump between row 5 (hour 5) and row 6 (hour 8)
        # are dropped; fully in-segment targets survive
        assert list(seqs.target_idx) == [4, 5, 10, 11]

    def test_all_masked_yields_empty_set(self):
        rows = make_rows(np.arange(8.0), coverage=100.0)
        seqs = estrus.make_sequences(rows, self.fit_scaler(rows), lookback=4)
        assert len(seqs) == 0


# ---------------------------------------------------------------------------
# LSTM forward


def scalar_lstm(model, sequence):
    """Scalar-loop rendition of the documented gate equations."""
    hidden, width = model.hidden_size, model.hidden_size + model.input_size
    sig = lambda a: 1.0 / (1.0 + math.exp(-a))
    h = [0.0] * hidden
    c = [0.0] * hidden
    for x_t in sequence:
        z = list(h) + [float(v) for v in x_t]

        def gate(w, b, fn):
            return [
                fn(sum(w[r][k] * z[k] for k in range(width)) + b[r])
                for r in range(hidden)
            ]

        f = gate(model.W_f, model.b_f, sig)
        i = gate(model.W_i, model.b_i, sig)
        g = gate(model.W_C, model.b_C, math.tanh)
        o = gate(model.W_o, model.b_o, sig)
        c = [f[r] * c[r] + i[r] * g[r] for r in range(hidden)]
        h = [o[r] * math.tanh(c[r]) for r in range(hidden)]
    pred = sum(model.W_out[r] * h[r] for r in range(hidden)) + model.b_out[0]
    return pred, h, c


class TestLstmForward:
    def test_zero_model_predicts_bias(self):
        model = zero_model(b_out=0.7)
        pred, state = estrus.lstm_forward(model, np.ones((6, 5)))
        assert pred == 0.7
        assert (state.h == 0.0).all()
        assert (state.C == 0.0).all()

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_scalar_gate_equations(self, seed):
        rng = np.random.default_rng(seed)
        hidden = int(rng.integers(2, 5))
        model = estrus.LstmModel.init_random(hidden, 5, seed=seed + 10)
        seq = rng.normal(0.0, 1.0, (6, 5))
        pred, state = estrus.lstm_forward(model, seq)
        want_pred, want_h, want_c = scalar_lstm(model, seq)
        assert pred == pytest.approx(want_pred, rel=1e-12, abs=1e-12)
        np.testing.assert_allclose(state.h, want_h, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(state.C, want_c, rtol=1e-12, atol=1e-12)

    def test_hidden_state_bounded(self):
        model = estrus.LstmModel.init_random(8, 5, seed=99)
        rng = np.random.default_rng(1)
        _, state = estrus.lstm_forward(model, rng.normal(0, 10, (50, 5)))
        # h = o * tanh(C) with o in (0,1), so |h| < 1 regardless of inputs
        assert (np.abs(state.h) < 1.0).all()

    def test_shape_mismatch_rejected(self):
        model = estrus.LstmModel.init_random(4, 5, seed=0)
        with pytest.raises(ShapeMismatch):
            estrus.lstm_forward(model, np.ones((6, 3)))
        with pytest.raises(ShapeMismatch):
            estrus.lstm_forward(model, np.ones(5))

    def test_wrong_weight_shape_rejected(self):
        with pytest.raises(ValueError):
            estrus.LstmModel(
                2, 5,
                np.zeros((2, 6)),  # width should be 7
                np.zeros((2, 7)), np.zeros((2, 7)), np.zeros((2, 7)),
                np.zeros(2), np.zeros(2), np.zeros(2), np.zeros(2),
                np.zeros(2), np.zeros(1),
            )


# ---------------------------------------------------------------------------
# Training


def toy_sequences(n=12, lookback=8, targets=0.5, seed=0):
    rng = np.random.default_rng(seed)
    inputs = rng.uniform(0.0, 1.0, (n, lookback, 5))
    t = np.full(n, targets) if np.isscalar(targets) else np.asarray(targets, float)
    return estrus.SequenceSet(inputs, t, np.arange(lookback, lookback + n), lookback)


class TestLstmTrain:
    def test_fits_constant_target(self):
        seqs = toy_sequences(targets=0.5)
        cfg = estrus.LstmConfig(hidden_size=4, epochs=500, learning_rate=1e-2,
                                seed=1)
        result = estrus.lstm_train(seqs, cfg)
        assert result.final_loss < 1e-4
        assert result.epochs_run <= 500

    def test_deterministic(self):
        seqs = toy_sequences(targets=np.linspace(0.2, 0.8, 12))
        cfg = estrus.LstmConfig(hidden_size=4, epochs=60, seed=7)
        a = estrus.lstm_train(seqs, cfg)
        b = estrus.lstm_train(seqs, cfg)
        assert a.final_loss == b.final_loss
        assert a.epochs_run == b.epochs_run
        for pa, pb in zip(a.model.params(), b.model.params()):
            assert pa.tobytes() == pb.tobytes()

    def test_seed_changes_outcome(self):
        seqs = toy_sequences(targets=np.linspace(0.2, 0.8, 12))
        a = estrus.lstm_train(seqs, estrus.LstmConfig(hidden_size=4, epochs=40, seed=1))
        b = estrus.lstm_train(seqs, estrus.LstmConfig(hidden_size=4, epochs=40, seed=2))
        assert a.final_loss != b.final_loss

    def test_plateau_stops_early(self):
        # identical inputs with contradictory targets: loss floors at 0.25
        inputs = np.tile(np.linspace(0, 1, 40).reshape(1, 8, 5), (10, 1, 1))
        targets = np.array([0.0, 1.0] * 5)
        seqs = estrus.SequenceSet(inputs, targets, np.arange(8, 18), 8)
        cfg = estrus.LstmConfig(hidden_size=4, epochs=5000, learning_rate=1e-2,
                                seed=0)
        result = estrus.lstm_train(seqs, cfg)
        assert result.epochs_run < 5000
        assert result.final_loss == pytest.approx(0.25, abs=1e-3)

    @pytest.mark.filterwarnings("ignore:overflow")
    def test_diverged_loss_raised(self):
        seqs = toy_sequences(targets=1e200)
        with pytest.raises(DivergedLoss):
            estrus.lstm_train(seqs, estrus.LstmConfig(hidden_size=4, epochs=5))

    def test_empty_sequences_rejected(self):
        empty = estrus.SequenceSet(
            np.zeros((0, 4, 5)), np.zeros(0), np.zeros(0, dtype=np.int64), 4
        )
        with pytest.raises(EmptyFit):
            estrus.lstm_train(empty)


class TestGradientCheck:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_analytic_matches_numeric(self, seed):
        rng = np.random.default_rng(seed)
        hidden = int(rng.integers(2, 6))
        model = estrus.LstmModel.init_random(hidden, 5, seed=seed)
        seq = rng.normal(0.0, 0.5, (int(rng.integers(4, 10)), 5))
        assert estrus.gradient_check(model, seq, float(rng.uniform())) < 1e-4

    def test_detects_doubled_gradient(self, monkeypatch):
        real = estrus._loss_and_grads

        def doubled(model, x, y):
            loss, grads = real(model, x, y)
            grads[0] = grads[0] * 2.0  # corrupt the W_f gradient
            return loss, grads

        monkeypatch.setattr(estrus, "_loss_and_grads", doubled)
        model = estrus.LstmModel.init_random(4, 5, seed=3)
        seq = np.random.default_rng(3).normal(0.0, 0.5, (8, 5))
        assert estrus.gradient_check(model, seq, 0.3) > 1e-2

    def test_zero_gradients_well_defined(self):
        # all-zero model: many gradients vanish; the floor avoids 0/0
        assert estrus.gradient_check(zero_model(), np.zeros((6, 5)), 0.0) < 1e-4


# ---------------------------------------------------------------------------
# Threshold calibration and anomaly detection


class TestCalibrateThreshold:
    def rows_with_targets(self):
        # zero model predicts 0, so squared errors equal scaled targets²
        others = [0.0, 0.0, 0.0, 0.0, 30.0, 60.0, 15.0, 45.0]
        rows = make_rows(others)
        scaler = estrus.MinMaxScaler(np.zeros(3), np.full(3, 60.0))
        return rows, scaler

    def test_median_of_known_errors(self):
        rows, scaler = self.rows_with_targets()
        # errors: 0.25, 1.0, 0.0625, 0.5625 -> median 0.40625
        thr = estrus.calibrate_threshold(zero_model(), scaler, rows, q=0.5,
                                         lookback=4)
        assert thr == pytest.approx(0.40625, abs=1e-15)

    def test_full_quantile_is_max(self):
        rows, scaler = self.rows_with_targets()
        thr = estrus.calibrate_threshold(zero_model(), scaler, rows, q=1.0,
                                         lookback=4)
        assert thr == pytest.approx(1.0, abs=1e-15)

    def test_quantile_out_of_range(self):
        rows, scaler = self.rows_with_targets()
        with pytest.raises(ValueError):
            estrus.calibrate_threshold(zero_model(), scaler, rows, q=1.5,
                                       lookback=4)

    def test_all_masked_raises(self):
        rows = make_rows(np.arange(8.0), coverage=0.0)
        scaler = estrus.MinMaxScaler(np.zeros(3), np.full(3, 60.0))
        with pytest.raises(InsufficientHistory):
            estrus.calibrate_threshold(zero_model(), scaler, rows, lookback=4)


class TestDetectAnomalies:
    scaler = estrus.MinMaxScaler(np.zeros(3), np.full(3, 60.0))

    def test_upward_spike_flagged(self):
        others = [0.0] * 9 + [60.0] + [0.0] * 2
        rows = make_rows(others)
        records = estrus.detect_anomalies(zero_model(), self.scaler, rows,
                                          threshold=0.5, lookback=4)
        assert len(records) == 8  # targets 4..11
        flagged = [r for r in records if r.is_anomaly]
        assert len(flagged) == 1
        assert flagged[0].hour == 9
        assert flagged[0].actual_others_min == 60.0
        assert flagged[0].predicted_others_min == 0.0
        assert flagged[0].sq_error == 1.0

    def test_downward_deviation_not_flagged(self):
        # prediction pinned at scaled 1.0 (60 min); actuals are all below
        model = zero_model(b_out=1.0)
        rows = make_rows([0.0] * 12)
        records = estrus.detect_anomalies(model, self.scaler, rows,
                                          threshold=0.5, lookback=4)
        assert not any(r.is_anomaly for r in records)
        assert all(r.sq_error == 1.0 for r in records)

    def test_history_extends_lookback(self):
        history = make_rows([0.0] * 6)
        rows = make_rows([0.0, 60.0, 0.0], start_hour=6)
        records = estrus.detect_anomalies(zero_model(), self.scaler, rows,
                                          threshold=0.5, lookback=4,
                                          history=history)
        # every test row gets a verdict thanks to the prepended history
        assert [(r.hour, r.is_anomaly) for r in records] == [
            (6, False), (7, True), (8, False),
        ]

    def test_no_targets_in_rows_raises(self):
        history = make_rows([0.0] * 6)
        with pytest.raises(InsufficientHistory):
            estrus.detect_anomalies(zero_model(), self.scaler, [],
                                    threshold=0.5, lookback=4, history=history)


class TestFlagEstrus:
    def records(self, day, flags):
        return [
            estrus.AnomalyRecord(day, h, 0.0, 0.0, 0.0, f)
            for h, f in enumerate(flags)
        ]

    def test_three_anomalous_hours_is_heat(self):
        recs = self.records(date(2024, 2, 1), [True, True, True] + [False] * 21)
        verdicts = estrus.flag_estrus(recs)
        assert verdicts == [estrus.DayVerdict(date(2024, 2, 1), 3, True)]

    def test_two_hours_is_not(self):
        recs = self.records(date(2024, 2, 1), [True, True] + [False] * 22)
        assert estrus.flag_estrus(recs)[0].is_heat is False

    def test_custom_minimum(self):
        recs = self.records(date(2024, 2, 1), [True] + [False] * 23)
        assert estrus.flag_estrus(recs, min_anomaly_hours=1)[0].is_heat is True

    def test_days_sorted(self):
        recs = self.records(date(2024, 2, 2), [False] * 24) + self.records(
            date(2024, 2, 1), [True] * 24
        )
        verdicts = estrus.flag_estrus(recs)
        assert [v.day for v in verdicts] == [date(2024, 2, 1), date(2024, 2, 2)]


# ---------------------------------------------------------------------------
# Activity-index baseline


class TestShahriarGamma:
    def test_others_weight(self):
        row = HourlyRow(date(2024, 1, 1), 0, 0.0, 0.0, 0.0, 60.0, 3600.0)
        assert estrus.shahriar_gamma(row) == 54.0

    def test_ruminating_ignored(self):
        row = HourlyRow(date(2024, 1, 1), 0, 0.0, 60.0, 0.0, 0.0, 3600.0)
        assert estrus.shahriar_gamma(row) == 0.0

    def test_mixed(self):
        row = HourlyRow(date(2024, 1, 1), 0, 20.0, 5.0, 25.0, 10.0, 3600.0)
        assert estrus.shahriar_gamma(row) == pytest.approx(9.0 + 2.0)


class TestShahriarDelta:
    def test_steady_state_is_exactly_zero(self):
        gammas = np.full(80, 17.0)
        assert estrus.shahriar_delta(gammas, 72) == 0.0

    def test_hand_case(self):
        gammas = np.zeros(73)
        gammas[[0, 24, 48]] = 1.0
        gammas[72] = 3.0
        # (3*3 - 3) / (3 + 3) = 1 exactly
        assert estrus.shahriar_delta(gammas, 72) == 1.0

    def test_zero_history_gives_max(self):
        gammas = np.zeros(73)
        gammas[72] = 5.0
        assert estrus.shahriar_delta(gammas, 72) == 3.0

    def test_insufficient_history(self):
        with pytest.raises(InsufficientHistory):
            estrus.shahriar_delta(np.ones(80), 71)

    def test_zero_denominator(self):
        with pytest.raises(ZeroDenominator):
            estrus.shahriar_delta(np.zeros(80), 72)

    @given(
        st.lists(
            st.floats(0.0, 1e6, allow_nan=False, allow_infinity=False),
            min_size=73,
            max_size=73,
        )
    )
    def test_bounded(self, values):
        gammas = np.array(values)
        assume(gammas[72] + gammas[0] + gammas[24] + gammas[48] > 0.0)
        assert -1.0 <= estrus.shahriar_delta(gammas, 72) <= 3.0


class TestShahriarSeries:
    def test_series_matches_pointwise(self):
        rng = np.random.default_rng(5)
        rows = make_rows(rng.uniform(0, 60, 100), feeding=10.0)
        series = estrus.shahriar_delta_series(rows)
        gammas = estrus.gamma_series(rows)
        assert not series.valid[:72].any()
        for t in range(72, 100):
            assert series.valid[t]
            assert series.delta[t] == estrus.shahriar_delta(gammas, t)

    def test_zero_hours_masked_not_raised(self):
        rows = make_rows([0.0] * 80)
        series = estrus.shahriar_delta_series(rows)
        assert not series.valid.any()
        assert np.isnan(series.delta[72:]).all()

    def test_detect_flags_jump_day(self):
        # three flat days of history, then a day at four times the activity
        rows = make_rows([5.0] * 72 + [20.0] * 24)
        verdicts = estrus.shahriar_detect(estrus.shahriar_delta_series(rows))
        # days without any valid delta hour produce no verdict at all
        assert len(verdicts) == 1
        assert verdicts[0].day == date(2024, 1, 9)
        # delta = (60 - 15)/(20 + 15) ~ 1.29 > 0.4 for all 24 hours
        assert verdicts[0].anomaly_hours == 24
        assert verdicts[0].is_heat is True

    def test_detect_respects_threshold(self):
        rows = make_rows([5.0] * 72 + [20.0] * 24)
        series = estrus.shahriar_delta_series(rows)
        verdicts = estrus.shahriar_detect(series, delta_threshold=3.0)
        assert not any(v.is_heat for v in verdicts)

    def test_steady_rows_never_flag(self):
        rows = make_rows([30.0] * 96)
        verdicts = estrus.shahriar_detect(estrus.shahriar_delta_series(rows))
        assert all(v.anomaly_hours == 0 for v in verdicts)


# ---------------------------------------------------------------------------
# Persistence and report files


class TestLstmPersistence:
    def bundle(self, tmp_path):
        model = estrus.LstmModel.init_random(4, 5, seed=11)
        scaler = estrus.MinMaxScaler(np.array([0.0, 1.0, 2.0]),
                                     np.array([10.0, 11.0, 12.0]))
        path = tmp_path / "estrus.json"
        estrus.save_lstm(model, scaler, 0.0625, path, min_anomaly_hours=4,
                         lookback=48)
        return model, scaler, path

    def test_round_trip(self, tmp_path):
        model, scaler, path = self.bundle(tmp_path)
        loaded = estrus.load_lstm(path)
        for name in estrus.LstmModel.PARAM_NAMES:
            np.testing.assert_array_equal(
                getattr(loaded.model, name), getattr(model, name)
            )
        np.testing.assert_array_equal(loaded.scaler.mins, scaler.mins)
        np.testing.assert_array_equal(loaded.scaler.maxs, scaler.maxs)
        assert loaded.threshold == 0.0625
        assert loaded.min_anomaly_hours == 4
        assert loaded.lookback == 48

    def test_round_trip_preserves_predictions(self, tmp_path):
        model, _, path = self.bundle(tmp_path)
        loaded = estrus.load_lstm(path)
        seq = np.random.default_rng(1).normal(0, 1, (12, 5))
        assert estrus.lstm_forward(loaded.model, seq)[0] == \
            estrus.lstm_forward(model, seq)[0]

    def test_truncated_file(self, tmp_path):
        _, _, path = self.bundle(tmp_path)
        raw = path.read_text()
        path.write_text(raw[: len(raw) // 2])
        with pytest.raises(CorruptModel):
            estrus.load_lstm(path)

    def test_version_mismatch(self, tmp_path):
        _, _, path = self.bundle(tmp_path)
        payload = json.loads(path.read_text())
        payload["version"] = 999
        path.write_text(json.dumps(payload))
        with pytest.raises(VersionMismatch) as exc:
            estrus.load_lstm(path)
        assert exc.value.found == 999
        assert exc.value.expected == estrus.MODEL_VERSION

    def test_missing_weight(self, tmp_path):
        _, _, path = self.bundle(tmp_path)
        payload = json.loads(path.read_text())
        del payload["weights"]["W_f"]
        path.write_text(json.dumps(payload))
        with pytest.raises(CorruptModel):
            estrus.load_lstm(path)

    def test_non_object_payload(self, tmp_path):
        path = tmp_path / "estrus.json"
        path.write_text("[]")
        with pytest.raises(CorruptModel):
            estrus.load_lstm(path)


class TestReportFiles:
    def test_anomaly_round_trip(self, tmp_path):
        records = [
            estrus.AnomalyRecord(date(2024, 3, 1), 7, 12.25, 30.5, 0.09375, True),
            estrus.AnomalyRecord(date(2024, 3, 1), 8, 1.0 / 3.0, 0.1, 2e-7, False),
        ]
        path = tmp_path / "anomalies.csv"
        estrus.write_anomaly_csv(records, path)
        assert estrus.read_anomaly_csv(path) == records

    def test_verdict_round_trip(self, tmp_path):
        verdicts = [
            estrus.DayVerdict(date(2024, 3, 1), 5, True),
            estrus.DayVerdict(date(2024, 3, 2), 0, False),
        ]
        path = tmp_path / "verdicts.csv"
        estrus.write_verdict_csv(verdicts, path)
        assert estrus.read_verdict_csv(path) == verdicts

    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "verdicts.csv"
        path.write_text("a,b,c\n")
        with pytest.raises(ValueError):
            estrus.read_verdict_csv(path)


# ---------------------------------------------------------------------------
# Scaling equivariance


class TestScalingEquivariance:
    """Multiplying all minute columns by a power of two leaves the scaled
    pipeline bit-identical: the factor is exact in binary floating point
    and cancels in (x - min)/(max - min)."""

    def scaled_rows(self, rows, k):
        return [
            HourlyRow(r.day, r.hour, r.feeding_min * k, r.ruminating_min * k,
                      r.lying_min * k, r.others_min * k, r.coverage_s)
            for r in rows
        ]

    def setup_method(self):
        rng = np.random.default_rng(7)
        self.rows = make_rows(
            rng.uniform(0.0, 60.0, 40),
            feeding=rng.uniform(0.0, 30.0, 40),
            ruminating=rng.uniform(0.0, 30.0, 40),
        )
        self.rows4 = self.scaled_rows(self.rows, 4.0)

    def test_sequences_bit_identical(self):
        seqs = estrus.make_sequences(
            self.rows, estrus.fit_row_scaler(self.rows), lookback=6
        )
        seqs4 = estrus.make_sequences(
            self.rows4, estrus.fit_row_scaler(self.rows4), lookback=6
        )
        assert seqs.inputs.tobytes() == seqs4.inputs.tobytes()
        assert seqs.targets.tobytes() == seqs4.targets.tobytes()

    def test_threshold_and_flags_invariant(self):
        model = estrus.LstmModel.init_random(4, 5, seed=2)
        calib, test = self.rows[:20], self.rows[20:]
        calib4, test4 = self.rows4[:20], self.rows4[20:]
        scaler = estrus.fit_row_scaler(calib)
        scaler4 = estrus.fit_row_scaler(calib4)
        thr = estrus.calibrate_threshold(model, scaler, calib, q=0.8, lookback=6)
        thr4 = estrus.calibrate_threshold(model, scaler4, calib4, q=0.8, lookback=6)
        assert thr == thr4
        recs = estrus.detect_anomalies(model, scaler, test, thr, lookback=6,
                                       history=calib[-6:])
        recs4 = estrus.detect_anomalies(model, scaler4, test4, thr4, lookback=6,
                                        history=calib4[-6:])
        assert [r.is_anomaly for r in recs] == [r.is_anomaly for r in recs4]
        for a, b in zip(recs, recs4):
            assert b.sq_error == a.sq_error
            assert b.actual_others_min == 4.0 * a.actual_others_min
            assert b.predicted_others_min == 4.0 * a.predicted_others_min
