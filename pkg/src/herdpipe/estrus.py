"""Estrus detection from hourly activity summaries, two ways.

Route one: an LSTM (implemented here from gates to BPTT) predicts the next
hour's Others minutes from a 72-hour lookback of [hour-of-day, ruminating,
feeding, others]; hours whose squared prediction error exceeds a
validation-calibrated threshold *and* whose actual exceeds predicted count
as anomalies, and a day with at least min_anomaly_hours of them is flagged
as heat.

Route two: the activity-index baseline γ_t = others·0.9 + feeding·0.1 with
δ_t = (3γ_t − (γ_{t−72}+γ_{t−48}+γ_{t−24})) / (γ_t + γ_{t−72}+γ_{t−48}+γ_{t−24}),
thresholded per hour and counted per day the same way.

Hour-of-day enters the sequences as sin/cos of 2πh/24 — one logical input,
two physical columns — so an input row has 5 values. Only the three minute
columns pass through the MinMaxScaler; the target shares the others_min
column scaling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import date

import csv

import numpy as np

from .errors import (
    CorruptModel,
    DivergedLoss,
    EmptyFit,
    InsufficientHistory,
    ShapeMismatch,
    VersionMismatch,
    ZeroDenominator,
)
from .summarize import HourlyRow

LOOKBACK_HOURS = 72
INPUT_SIZE = 5  # hour_sin, hour_cos, ruminating_min, feeding_min, others_min
MIN_COVERAGE_S = 1800.0  # half of an hour at 0.5 s per sample
OTHERS_COL = 2  # scaler column order: ruminating, feeding, others

DEFAULT_QUANTILE = 0.99
DEFAULT_MIN_ANOMALY_HOURS = 3
DEFAULT_DELTA_THRESHOLD = 0.4

DELTA_LAGS = (72, 48, 24)

MODEL_VERSION = 1

ANOMALY_HEADER = (
    "day",
    "hour",
    "predicted_others_min",
    "actual_others_min",
    "sq_error",
    "is_anomaly",
)
VERDICT_HEADER = ("day", "anomaly_hours", "is_heat")


# ---------------------------------------------------------------------------
# Min-max scaling


@dataclass(frozen=True)
class MinMaxScaler:
    """Per-column affine map x → (x − min)/(max − min); constant columns → 0."""

    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        if self.mins.shape != self.maxs.shape or self.mins.ndim != 1:
            raise ValueError("scaler min/max must be matching vectors")
        if (self.maxs < self.mins).any():
            raise ValueError("scaler max must be >= min")

    @property
    def spans(self) -> np.ndarray:
        return self.maxs - self.mins


def minmax_fit(rows: np.ndarray) -> MinMaxScaler:
    x = np.asarray(rows, dtype=np.float64)
    if x.ndim != 2 or len(x) == 0:
        raise EmptyFit("minmax_fit needs a non-empty (n, k) matrix")
    return MinMaxScaler(x.min(axis=0), x.max(axis=0))


def minmax_apply(scaler: MinMaxScaler, rows: np.ndarray) -> np.ndarray:
    """Affine map without clipping: out-of-range inputs land outside [0, 1]."""
    x = np.asarray(rows, dtype=np.float64)
    span = np.where(scaler.spans == 0, 1.0, scaler.spans)
    z = (x - scaler.mins) / span
    if z.ndim == 2:
        z[:, scaler.spans == 0] = 0.0
    else:
        z[scaler.spans == 0] = 0.0
    return z


def minmax_inverse(scaler: MinMaxScaler, rows: np.ndarray) -> np.ndarray:
    """Inverse of minmax_apply; constant columns recover their fitted value."""
    z = np.asarray(rows, dtype=np.float64)
    return z * scaler.spans + scaler.mins


# ---------------------------------------------------------------------------
# Sequences


@dataclass(frozen=True)
class SequenceSet:
    """Chronological (lookback × 5) inputs with scaled next-hour targets.

    ``target_idx`` maps each sequence back to the hourly-row index whose
    others_min is the target.
    """

    inputs: np.ndarray
    targets: np.ndarray
    target_idx: np.ndarray
    lookback: int

    def __len__(self) -> int:
        return len(self.targets)


def _row_day_hour(row: HourlyRow) -> int:
    return row.day.toordinal() * 24 + row.hour


def minute_matrix(rows: list[HourlyRow]) -> np.ndarray:
    """(n, 3) matrix of [ruminating_min, feeding_min, others_min]."""
    return np.array(
        [[r.ruminating_min, r.feeding_min, r.others_min] for r in rows], dtype=np.float64
    )


def fit_row_scaler(rows: list[HourlyRow]) -> MinMaxScaler:
    """Fit the minute-column scaler (training rows only, to avoid leakage)."""
    return minmax_fit(minute_matrix(rows))


def make_sequences(
    rows: list[HourlyRow], scaler: MinMaxScaler, lookback: int = LOOKBACK_HOURS
) -> SequenceSet:
    """One sequence per target hour with a full, clean lookback behind it.

    A sequence is dropped if any hour it touches (the lookback window or
    the target) has coverage below half the hour, or if the hours are not
    contiguous (e.g. rows concatenated across a gap).
    """
    if len(rows) < lookback + 1:
        raise InsufficientHistory(
            f"need at least {lookback + 1} hourly rows, got {len(rows)}"
        )
    hours_abs = np.array([_row_day_hour(r) for r in rows], dtype=np.int64)
    if (np.diff(hours_abs) <= 0).any():
        raise ValueError("hourly rows must be strictly chronological")
    scaled = minmax_apply(scaler, minute_matrix(rows))
    hour_of_day = np.array([r.hour for r in rows], dtype=np.float64)
    angle = 2.0 * np.pi * hour_of_day / 24.0
    features = np.column_stack((np.sin(angle), np.cos(angle), scaled))
    ok = np.array([r.coverage_s >= MIN_COVERAGE_S for r in rows])
    ok_cum = np.concatenate(([0], np.cumsum(ok)))
    targets_idx = np.arange(lookback, len(rows))
    clean = (ok_cum[targets_idx + 1] - ok_cum[targets_idx - lookback]) == lookback + 1
    contiguous = hours_abs[targets_idx] - hours_abs[targets_idx - lookback] == lookback
    keep = targets_idx[clean & contiguous]
    windows = np.lib.stride_tricks.sliding_window_view(features, lookback, axis=0)
    inputs = windows[keep - lookback].transpose(0, 2, 1).copy()
    return SequenceSet(
        inputs, scaled[keep, OTHERS_COL].copy(), keep.astype(np.int64), lookback
    )


# ---------------------------------------------------------------------------
# LSTM


@dataclass(frozen=True)
class LstmState:
    h: np.ndarray
    C: np.ndarray


class LstmModel:
    """Single-layer LSTM with a scalar linear readout.

    Gate weights act on the concatenation [h_{t−1}, x_t]:
        f_t = σ(W_f·[h,x] + b_f)      i_t = σ(W_i·[h,x] + b_i)
        C̃_t = tanh(W_C·[h,x] + b_C)   C_t = f_t·C_{t−1} + i_t·C̃_t
        o_t = σ(W_o·[h,x] + b_o)      h_t = o_t·tanh(C_t)
    and the prediction is W_out·h_T + b_out.
    """

    PARAM_NAMES = ("W_f", "W_i", "W_C", "W_o", "b_f", "b_i", "b_C", "b_o", "W_out", "b_out")

    def __init__(self, hidden_size, input_size, W_f, W_i, W_C, W_o,
                 b_f, b_i, b_C, b_o, W_out, b_out):
        self.hidden_size = int(hidden_size)
        self.input_size = int(input_size)
        self.W_f, self.W_i, self.W_C, self.W_o = W_f, W_i, W_C, W_o
        self.b_f, self.b_i, self.b_C, self.b_o = b_f, b_i, b_C, b_o
        self.W_out, self.b_out = W_out, b_out
        width = self.hidden_size + self.input_size
        for name in ("W_f", "W_i", "W_C", "W_o"):
            if getattr(self, name).shape != (self.hidden_size, width):
                raise ValueError(f"{name} must be (hidden, hidden+input)")
        for name in ("b_f", "b_i", "b_C", "b_o", "W_out"):
            if getattr(self, name).shape != (self.hidden_size,):
                raise ValueError(f"{name} must be (hidden,)")
        if self.b_out.shape != (1,):
            raise ValueError("b_out must have shape (1,)")

    @classmethod
    def init_random(cls, hidden_size: int, input_size: int = INPUT_SIZE, seed=0):
        """Small random gate weights; forget bias starts at 1 so early
        training does not wipe the cell state."""
        rng = np.random.default_rng(seed)
        width = hidden_size + input_size
        def w():
            return rng.normal(0.0, 0.1, (hidden_size, width))
        return cls(
            hidden_size,
            input_size,
            w(), w(), w(), w(),
            np.ones(hidden_size),
            np.zeros(hidden_size),
            np.zeros(hidden_size),
            np.zeros(hidden_size),
            rng.normal(0.0, 0.1, hidden_size),
            np.zeros(1),
        )

    def params(self) -> list[np.ndarray]:
        return [getattr(self, name) for name in self.PARAM_NAMES]

    def clone(self) -> "LstmModel":
        return LstmModel(
            self.hidden_size, self.input_size, *[p.copy() for p in self.params()]
        )


def _sigmoid(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    ea = np.exp(a[~pos])
    out[~pos] = ea / (1.0 + ea)
    return out


def _forward_batch(model: LstmModel, x: np.ndarray, keep_cache: bool = False):
    b, t_len, _ = x.shape
    hidden = model.hidden_size
    h = np.zeros((b, hidden))
    c = np.zeros((b, hidden))
    cache = []
    for t in range(t_len):
        z = np.concatenate((h, x[:, t, :]), axis=1)
        f = _sigmoid(z @ model.W_f.T + model.b_f)
        i = _sigmoid(z @ model.W_i.T + model.b_i)
        g = np.tanh(z @ model.W_C.T + model.b_C)
        o = _sigmoid(z @ model.W_o.T + model.b_o)
        c_prev = c
        c = f * c_prev + i * g
        h = o * np.tanh(c)
        if keep_cache:
            cache.append((z, f, i, g, o, c_prev, c))
    pred = h @ model.W_out + model.b_out[0]
    return pred, h, c, cache


def lstm_forward(model: LstmModel, sequence: np.ndarray) -> tuple[float, LstmState]:
    """Run one scaled sequence through the gate equations from zero state."""
    x = np.asarray(sequence, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.input_size:
        raise ShapeMismatch(
            f"sequence must be (steps, {model.input_size}), got {x.shape}"
        )
    pred, h, c, _ = _forward_batch(model, x[None, :, :])
    return float(pred[0]), LstmState(h[0], c[0])


def _loss_and_grads(model: LstmModel, x: np.ndarray, y: np.ndarray):
    """MSE loss and its full-BPTT gradient for a batch of sequences."""
    pred, h_last, _, cache = _forward_batch(model, x, keep_cache=True)
    b = len(y)
    hidden = model.hidden_size
    err = pred - y
    loss = float(np.mean(err * err))
    dpred = (2.0 / b) * err
    grads = {name: np.zeros_like(getattr(model, name)) for name in model.PARAM_NAMES}
    grads["W_out"] = h_last.T @ dpred
    grads["b_out"] = np.array([dpred.sum()])
    dh = dpred[:, None] * model.W_out[None, :]
    dc = np.zeros((b, hidden))
    for t in range(x.shape[1] - 1, -1, -1):
        z, f, i, g, o, c_prev, c = cache[t]
        tc = np.tanh(c)
        dc = dc + dh * o * (1.0 - tc * tc)
        da_o = dh * tc * o * (1.0 - o)
        da_f = dc * c_prev * f * (1.0 - f)
        da_i = dc * g * i * (1.0 - i)
        da_g = dc * i * (1.0 - g * g)
        grads["W_f"] += da_f.T @ z
        grads["W_i"] += da_i.T @ z
        grads["W_C"] += da_g.T @ z
        grads["W_o"] += da_o.T @ z
        grads["b_f"] += da_f.sum(axis=0)
        grads["b_i"] += da_i.sum(axis=0)
        grads["b_C"] += da_g.sum(axis=0)
        grads["b_o"] += da_o.sum(axis=0)
        dz = da_f @ model.W_f + da_i @ model.W_i + da_g @ model.W_C + da_o @ model.W_o
        dh = dz[:, :hidden]
        dc = dc * f
    return loss, [grads[name] for name in model.PARAM_NAMES]


@dataclass(frozen=True)
class LstmConfig:
    """Training hyperparameters (full-batch Adam with norm clipping)."""

    hidden_size: int = 32
    epochs: int = 2000
    learning_rate: float = 1e-3
    clip_norm: float = 5.0
    seed: int = 0
    plateau_patience: int = 60
    plateau_rel_tol: float = 1e-5


@dataclass(frozen=True)
class TrainResult:
    model: LstmModel
    final_loss: float
    epochs_run: int


def lstm_train(sequences: SequenceSet, config: LstmConfig | None = None) -> TrainResult:
    """Minimize MSE by full backpropagation-through-time.

    Full-batch Adam steps with global gradient-norm clipping; training
    stops early once the best loss has not improved by plateau_rel_tol
    (relative) for plateau_patience consecutive epochs. Deterministic
    given (sequences, config).
    """
    cfg = config or LstmConfig()
    if len(sequences) == 0:
        raise EmptyFit("cannot train without sequences")
    x = sequences.inputs
    y = sequences.targets
    model = LstmModel.init_random(cfg.hidden_size, x.shape[2], cfg.seed)
    params = model.params()
    m_state = [np.zeros_like(p) for p in params]
    v_state = [np.zeros_like(p) for p in params]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    best = math.inf
    stall = 0
    loss = math.inf
    epoch = 0
    for epoch in range(1, cfg.epochs + 1):
        loss, grads = _loss_and_grads(model, x, y)
        if not math.isfinite(loss):
            raise DivergedLoss(f"loss became {loss} at epoch {epoch}")
        if loss < best * (1.0 - cfg.plateau_rel_tol):
            best = loss
            stall = 0
        else:
            stall += 1
            if stall >= cfg.plateau_patience:
                break
        norm = math.sqrt(sum(float((g * g).sum()) for g in grads))
        if norm > cfg.clip_norm:
            scale = cfg.clip_norm / norm
            grads = [g * scale for g in grads]
        correction1 = 1.0 - beta1**epoch
        correction2 = 1.0 - beta2**epoch
        for p, g, m_s, v_s in zip(params, grads, m_state, v_state):
            m_s *= beta1
            m_s += (1.0 - beta1) * g
            v_s *= beta2
            v_s += (1.0 - beta2) * g * g
            p -= cfg.learning_rate * (m_s / correction1) / (
                np.sqrt(v_s / correction2) + eps
            )
    return TrainResult(model, loss, epoch)


def gradient_check(model: LstmModel, sequence: np.ndarray, target: float,
                   epsilon: float = 1e-5) -> float:
    """Max relative error of BPTT gradients vs central finite differences.

    Relative error per parameter is |g_a − g_n| / max(|g_a|, |g_n|, 1e−8);
    the floor keeps zero-gradient parameters well-defined.
    """
    x = np.asarray(sequence, dtype=np.float64)[None, :, :]
    y = np.array([float(target)])

    def loss_only() -> float:
        pred, _, _, _ = _forward_batch(model, x)
        return float(np.mean((pred - y) ** 2))

    _, analytic = _loss_and_grads(model, x, y)
    worst = 0.0
    for arr, grad in zip(model.params(), analytic):
        flat = arr.reshape(-1)
        gflat = grad.reshape(-1)
        for j in range(flat.size):
            keep = flat[j]
            flat[j] = keep + epsilon
            up = loss_only()
            flat[j] = keep - epsilon
            down = loss_only()
            flat[j] = keep
            numeric = (up - down) / (2.0 * epsilon)
            denom = max(abs(gflat[j]), abs(numeric), 1e-8)
            worst = max(worst, abs(gflat[j] - numeric) / denom)
    return worst


# ---------------------------------------------------------------------------
# Anomaly detection and heat flagging


@dataclass(frozen=True)
class AnomalyRecord:
    """One target hour: prediction vs actual (minutes) and scaled error."""

    day: date
    hour: int
    predicted_others_min: float
    actual_others_min: float
    sq_error: float
    is_anomaly: bool


@dataclass(frozen=True)
class DayVerdict:
    day: date
    anomaly_hours: int
    is_heat: bool


def _sequence_errors(model, scaler, rows, lookback):
    seqs = make_sequences(rows, scaler, lookback)
    if len(seqs) == 0:
        raise InsufficientHistory("every sequence was masked out")
    preds, _, _, _ = _forward_batch(model, seqs.inputs)
    errors = (preds - seqs.targets) ** 2
    return seqs, preds, errors


def calibrate_threshold(
    model: LstmModel,
    scaler: MinMaxScaler,
    validation_rows: list[HourlyRow],
    q: float = DEFAULT_QUANTILE,
    lookback: int = LOOKBACK_HOURS,
) -> float:
    """q-quantile (linear interpolation) of validation squared errors."""
    if not (0.0 <= q <= 1.0):
        raise ValueError("quantile must lie in [0, 1]")
    _, _, errors = _sequence_errors(model, scaler, validation_rows, lookback)
    return float(np.quantile(errors, q))


def detect_anomalies(
    model: LstmModel,
    scaler: MinMaxScaler,
    rows: list[HourlyRow],
    threshold: float,
    lookback: int = LOOKBACK_HOURS,
    history: list[HourlyRow] = (),
) -> list[AnomalyRecord]:
    """Per-hour anomaly flags over `rows`.

    ``history`` (typically the last lookback hours of training data) is
    prepended so the first test hour has a full sequence behind it; flags
    are only reported for `rows`. An hour is anomalous when its squared
    scaled error exceeds the threshold and the actual exceeds the
    prediction — only upward activity deviations indicate heat.
    """
    combined = list(history) + list(rows)
    seqs, preds, errors = _sequence_errors(model, scaler, combined, lookback)
    span = scaler.spans[OTHERS_COL]
    lo = scaler.mins[OTHERS_COL]
    records = []
    for k, idx in enumerate(seqs.target_idx):
        if idx < len(history):
            continue
        row = combined[idx]
        pred_minutes = float(preds[k] * (span if span else 1.0) + lo)
        flag = errors[k] > threshold and seqs.targets[k] > preds[k]
        records.append(
            AnomalyRecord(
                row.day,
                row.hour,
                pred_minutes,
                row.others_min,
                float(errors[k]),
                bool(flag),
            )
        )
    if not records:
        raise InsufficientHistory("no target hours fell inside the test rows")
    return records


def flag_estrus(
    records: list[AnomalyRecord], min_anomaly_hours: int = DEFAULT_MIN_ANOMALY_HOURS
) -> list[DayVerdict]:
    """Heat verdict per day: anomalous hours ≥ min_anomaly_hours."""
    per_day: dict[date, int] = {}
    for rec in records:
        per_day.setdefault(rec.day, 0)
        per_day[rec.day] += int(rec.is_anomaly)
    return [
        DayVerdict(day, count, count >= min_anomaly_hours)
        for day, count in sorted(per_day.items())
    ]


# ---------------------------------------------------------------------------
# Activity-index baseline


@dataclass(frozen=True)
class ActivityIndexSeries:
    """Hourly γ with δ where 72 h of history exists (masked elsewhere)."""

    days: tuple[date, ...]
    hours: tuple[int, ...]
    gamma: np.ndarray
    delta: np.ndarray
    valid: np.ndarray


def shahriar_gamma(row: HourlyRow) -> float:
    """γ_t = others·0.9 + feeding·0.1 (high/medium activity weights)."""
    return row.others_min * 0.9 + row.feeding_min * 0.1


def gamma_series(rows: list[HourlyRow]) -> np.ndarray:
    return np.array([shahriar_gamma(r) for r in rows], dtype=np.float64)


def shahriar_delta(gammas: np.ndarray, t: int) -> float:
    """δ_t = (3γ_t − Σ lags)/(γ_t + Σ lags) with lags at t−72, −48, −24."""
    if t < max(DELTA_LAGS):
        raise InsufficientHistory(f"δ needs {max(DELTA_LAGS)} hours of history")
    current = float(gammas[t])
    lagged = sum(float(gammas[t - lag]) for lag in DELTA_LAGS)
    denom = current + lagged
    if denom == 0.0:
        raise ZeroDenominator(f"all four γ values are zero at hour {t}")
    return (3.0 * current - lagged) / denom


def shahriar_delta_series(rows: list[HourlyRow]) -> ActivityIndexSeries:
    """δ over a row sequence; hours without history or with an all-zero
    denominator are masked rather than raised."""
    gammas = gamma_series(rows)
    n = len(rows)
    delta = np.full(n, np.nan)
    valid = np.zeros(n, dtype=bool)
    for t in range(max(DELTA_LAGS), n):
        try:
            delta[t] = shahriar_delta(gammas, t)
            valid[t] = True
        except ZeroDenominator:
            pass
    return ActivityIndexSeries(
        tuple(r.day for r in rows),
        tuple(r.hour for r in rows),
        gammas,
        delta,
        valid,
    )


def shahriar_detect(
    series: ActivityIndexSeries,
    delta_threshold: float = DEFAULT_DELTA_THRESHOLD,
    min_hours: int = DEFAULT_MIN_ANOMALY_HOURS,
) -> list[DayVerdict]:
    """Day verdicts from δ > threshold hours, grouped like flag_estrus."""
    per_day: dict[date, int] = {}
    for i in range(len(series.gamma)):
        if not series.valid[i]:
            continue
        per_day.setdefault(series.days[i], 0)
        per_day[series.days[i]] += int(series.delta[i] > delta_threshold)
    return [
        DayVerdict(day, count, count >= min_hours)
        for day, count in sorted(per_day.items())
    ]


# ---------------------------------------------------------------------------
# Persistence and report files


def save_lstm(
    model: LstmModel,
    scaler: MinMaxScaler,
    threshold: float,
    path,
    min_anomaly_hours: int = DEFAULT_MIN_ANOMALY_HOURS,
    lookback: int = LOOKBACK_HOURS,
) -> None:
    payload = {
        "version": MODEL_VERSION,
        "hidden_size": model.hidden_size,
        "input_size": model.input_size,
        "lookback": lookback,
        "weights": {
            name: getattr(model, name).tolist() for name in model.PARAM_NAMES
        },
        "scaler": {"min": scaler.mins.tolist(), "max": scaler.maxs.tolist()},
        "threshold": float(threshold),
        "min_anomaly_hours": int(min_anomaly_hours),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


@dataclass(frozen=True)
class LstmBundle:
    """Everything detect needs: model, scaler, threshold, flagging config."""

    model: LstmModel
    scaler: MinMaxScaler
    threshold: float
    min_anomaly_hours: int
    lookback: int


def load_lstm(path) -> LstmBundle:
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise CorruptModel(f"{path}: {exc}") from None
    if not isinstance(payload, dict) or "version" not in payload:
        raise CorruptModel(f"{path}: missing version field")
    if payload["version"] != MODEL_VERSION:
        raise VersionMismatch(payload["version"], MODEL_VERSION)
    try:
        weights = payload["weights"]
        arrays = [
            np.asarray(weights[name], dtype=np.float64) for name in LstmModel.PARAM_NAMES
        ]
        model = LstmModel(payload["hidden_size"], payload["input_size"], *arrays)
        scaler = MinMaxScaler(
            np.asarray(payload["scaler"]["min"], dtype=np.float64),
            np.asarray(payload["scaler"]["max"], dtype=np.float64),
        )
        return LstmBundle(
            model,
            scaler,
            float(payload["threshold"]),
            int(payload["min_anomaly_hours"]),
            int(payload["lookback"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"{path}: {exc}") from None


def write_anomaly_csv(records: list[AnomalyRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ANOMALY_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.day.isoformat(),
                    r.hour,
                    repr(float(r.predicted_others_min)),
                    repr(float(r.actual_others_min)),
                    repr(float(r.sq_error)),
                    int(r.is_anomaly),
                ]
            )


def read_anomaly_csv(path) -> list[AnomalyRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != ANOMALY_HEADER:
            raise ValueError(f"{path}: expected header {','.join(ANOMALY_HEADER)}")
        for row in reader:
            if not row:
                continue
            records.append(
                AnomalyRecord(
                    date.fromisoformat(row[0]),
                    int(row[1]),
                    float(row[2]),
                    float(row[3]),
                    float(row[4]),
                    bool(int(row[5])),
                )
            )
    return records


def write_verdict_csv(verdicts: list[DayVerdict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(VERDICT_HEADER)
        for v in verdicts:
            writer.writerow([v.day.isoformat(), v.anomaly_hours, int(v.is_heat)])


def read_verdict_csv(path) -> list[DayVerdict]:
    verdicts = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != VERDICT_HEADER:
            raise ValueError(f"{path}: expected header {','.join(VERDICT_HEADER)}")
        for row in reader:
            if not row:
                continue
            verdicts.append(
                DayVerdict(date.fromisoformat(row[0]), int(row[1]), bool(int(row[2])))
            )
    return verdicts
