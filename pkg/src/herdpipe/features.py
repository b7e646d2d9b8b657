"""Preprocessing and feature extraction.

Z-score normalization (population σ), 10-sample rolling windows with
majority labels, per-window {min, max, std, mean} statistics over all six
channels, and spectral features from a hand-rolled radix-2 FFT checked
against the naive DFT sum.

Feature schema order is fixed and documented:
``min_ax,max_ax,std_ax,mean_ax,...,mean_gz[,fft_domfreq,fft_dommag,band_e1..]``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BlockTooShort, EmptySeries
from .ingest import (
    Behavior,
    CHANNELS,
    LabeledSeries,
    N_BEHAVIORS,
    SampleSeries,
)

STAT_NAMES = ("min", "max", "std", "mean")
STATS24_SCHEMA = tuple(f"{s}_{c}" for c in CHANNELS for s in STAT_NAMES)
RAW6_SCHEMA = tuple(f"mean_{c}" for c in CHANNELS)

MIN_FFT_BLOCK = 16


class ParamMode(Enum):
    """Feature set variants: raw channel means, window stats, stats + FFT."""

    RAW6 = "raw6"
    STATS24 = "stats24"
    STATS24_FFT = "stats24fft"


# ---------------------------------------------------------------------------
# Z-score normalization


@dataclass(frozen=True)
class ZScoreStats:
    """Per-channel population mean/std; std == 0 marks a constant channel."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        if self.mean.shape != (len(CHANNELS),) or self.std.shape != (len(CHANNELS),):
            raise ValueError("stats must have one entry per channel")
        if (self.std < 0).any():
            raise ValueError("standard deviations must be >= 0")

    @property
    def constant(self) -> np.ndarray:
        return self.std == 0.0

    def to_dict(self) -> dict:
        return {"mean": [float(v) for v in self.mean], "std": [float(v) for v in self.std]}

    @classmethod
    def from_dict(cls, d: dict) -> "ZScoreStats":
        return cls(np.asarray(d["mean"], dtype=np.float64), np.asarray(d["std"], dtype=np.float64))


def fit_zscore(series: SampleSeries) -> ZScoreStats:
    """Population mean and standard deviation per channel."""
    if len(series) == 0:
        raise EmptySeries("cannot fit z-score on an empty series")
    return ZScoreStats(series.values.mean(axis=0), series.values.std(axis=0))


def apply_zscore(series: SampleSeries, stats: ZScoreStats) -> SampleSeries:
    """(X − μ)/σ per channel; constant channels map to 0."""
    scale = np.where(stats.constant, 1.0, stats.std)
    z = (series.values - stats.mean) / scale
    z[:, stats.constant] = 0.0
    return SampleSeries(series.timestamps, z, series.nominal_rate_hz)


def inverse_zscore(series: SampleSeries, stats: ZScoreStats) -> SampleSeries:
    """Undo apply_zscore; constant channels recover their fitted mean."""
    x = series.values * stats.std + stats.mean
    return SampleSeries(series.timestamps, x, series.nominal_rate_hz)


# ---------------------------------------------------------------------------
# Rolling windows


@dataclass(frozen=True)
class Window:
    """`size` consecutive samples plus the majority behavior label."""

    start: int
    samples: np.ndarray
    label: Behavior


def _window_starts(n: int, size: int, stride: int) -> np.ndarray:
    if size < 2:
        raise ValueError("window size must be >= 2")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if n < size:
        return np.empty(0, dtype=np.int64)
    return np.arange(0, n - size + 1, stride, dtype=np.int64)


def _window_labels(codes: np.ndarray, starts: np.ndarray, size: int) -> np.ndarray:
    """Majority label per window; ties go to the tied class seen latest."""
    n = len(codes)
    onehot = np.zeros((n + 1, N_BEHAVIORS), dtype=np.int32)
    onehot[np.arange(1, n + 1), codes] = 1
    cum = np.cumsum(onehot, axis=0)
    counts = cum[starts + size] - cum[starts]
    pos = np.where(
        codes[:, None] == np.arange(N_BEHAVIORS)[None, :], np.arange(n)[:, None], -1
    )
    last = np.maximum.accumulate(pos, axis=0)
    last_in_window = last[starts + size - 1]
    top = counts.max(axis=1, keepdims=True)
    score = np.where(counts == top, last_in_window, -1)
    return score.argmax(axis=1).astype(np.uint8)


def rolling_windows(labeled: LabeledSeries, size: int = 10, stride: int = 1) -> list[Window]:
    """Full windows at offsets 0, stride, 2·stride, …

    Yields floor((n − size)/stride) + 1 windows for n ≥ size, else none.
    The window label is the majority of member labels; ties break toward
    the tied label whose last occurrence in the window is most recent.
    """
    starts = _window_starts(len(labeled), size, stride)
    if len(starts) == 0:
        return []
    labels = _window_labels(labeled.labels, starts, size)
    values = labeled.series.values
    return [
        Window(int(s), values[s : s + size], Behavior(int(c))) for s, c in zip(starts, labels)
    ]


# ---------------------------------------------------------------------------
# Window statistics


@dataclass(frozen=True)
class WindowFeatures:
    """Ordered feature vector with its schema."""

    values: np.ndarray
    schema: tuple[str, ...]

    def __post_init__(self):
        if len(self.values) != len(self.schema):
            raise ValueError("values length must equal schema length")


def _batch_stats(values: np.ndarray, starts: np.ndarray, size: int) -> np.ndarray:
    """(nw, 24) array of {min,max,std,mean} per channel, schema order."""
    view = np.lib.stride_tricks.sliding_window_view(values, size, axis=0)[starts]
    stacked = np.stack(
        (view.min(axis=-1), view.max(axis=-1), view.std(axis=-1), view.mean(axis=-1)),
        axis=2,
    )
    return stacked.reshape(len(starts), len(CHANNELS) * len(STAT_NAMES))


def window_stats(window: Window) -> WindowFeatures:
    """{min, max, std (population), mean} for each of the six channels."""
    row = _batch_stats(window.samples, np.array([0]), len(window.samples))[0]
    return WindowFeatures(row, STATS24_SCHEMA)


# ---------------------------------------------------------------------------
# Spectra


@dataclass(frozen=True)
class Spectrum:
    """Complex DFT bins X_k for k = 0..n−1 of an n-point transform.

    ``orig_n`` is the pre-padding signal length (== n for dft).
    """

    bins: np.ndarray
    n: int
    orig_n: int

    def __post_init__(self):
        if len(self.bins) != self.n:
            raise ValueError("bin count must equal transform length")


def dft(signal) -> Spectrum:
    """Naive O(N²) evaluation of X_k = Σ_n x_n e^{−i2πkn/N}."""
    x = np.asarray(signal, dtype=np.float64)
    if len(x) == 0:
        raise EmptySeries("dft needs at least one sample")
    n = len(x)
    k = np.arange(n)
    # reduce k·n mod N before scaling so the basis angles stay in [0, 2π)
    basis = np.exp(-2j * np.pi * (np.outer(k, k) % n) / n)
    return Spectrum(basis @ x.astype(np.complex128), n, n)


def fft(signal) -> Spectrum:
    """Iterative radix-2 Cooley-Tukey transform, zero-padded to 2^m points."""
    x = np.asarray(signal, dtype=np.float64)
    orig_n = len(x)
    if orig_n == 0:
        raise EmptySeries("fft needs at least one sample")
    n = 1 << (orig_n - 1).bit_length() if orig_n > 1 else 1
    buf = np.zeros(n, dtype=np.complex128)
    buf[:orig_n] = x
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    buf = buf[rev]
    half = 1
    while half < n:
        twiddle = np.exp(-1j * np.pi * np.arange(half) / half)
        pairs = buf.reshape(-1, 2 * half)
        upper = pairs[:, :half].copy()
        lower = pairs[:, half:] * twiddle
        pairs[:, :half] = upper + lower
        pairs[:, half:] = upper - lower
        half *= 2
    return Spectrum(buf, n, orig_n)


def fft_features(segment, n_bands: int = 3, rate_hz: float = 2.0) -> np.ndarray:
    """Dominant nonzero-bin frequency/magnitude + band energies of a block.

    Returns [domfreq_hz, dommag, e_1..e_{n_bands}]: the positive-frequency
    bins k = 1..N/2 are scanned for the largest magnitude (frequency =
    k·rate/N), and their squared magnitudes are summed into n_bands
    equal-width bands partitioning (0, rate/2].
    """
    x = np.asarray(segment, dtype=np.float64)
    if len(x) < MIN_FFT_BLOCK:
        raise BlockTooShort(f"need >= {MIN_FFT_BLOCK} samples, got {len(x)}")
    if n_bands < 1:
        raise ValueError("n_bands must be >= 1")
    spectrum = fft(x)
    n = spectrum.n
    half = n // 2
    mags = np.abs(spectrum.bins[1 : half + 1])
    k_dom = 1 + int(np.argmax(mags))
    k = np.arange(1, half + 1)
    # band of bin k over (0, rate/2]: exact integer form of ceil(f/width)−1
    band_idx = (2 * k * n_bands - 1) // n
    energies = np.zeros(n_bands, dtype=np.float64)
    np.add.at(energies, band_idx, mags**2)
    return np.concatenate(
        ([k_dom * rate_hz / n, float(mags[k_dom - 1])], energies)
    )


def fft_schema(n_bands: int) -> tuple[str, ...]:
    return ("fft_domfreq", "fft_dommag") + tuple(f"band_e{j + 1}" for j in range(n_bands))


# ---------------------------------------------------------------------------
# Dataset assembly


@dataclass(frozen=True)
class FeatureConfig:
    """Windowing and spectral-block parameters."""

    window_size: int = 10
    stride: int = 1
    fft_block: int = 64
    n_bands: int = 3

    def __post_init__(self):
        if self.window_size < 2 or self.stride < 1:
            raise ValueError("window_size >= 2 and stride >= 1 required")
        if self.fft_block < MIN_FFT_BLOCK:
            raise ValueError(f"fft_block must be >= {MIN_FFT_BLOCK}")
        if self.n_bands < 1:
            raise ValueError("n_bands must be >= 1")


@dataclass(frozen=True)
class FeatureDataset:
    """Feature matrix with labels, schema, and the mode that produced it."""

    values: np.ndarray
    labels: np.ndarray
    schema: tuple[str, ...]
    param_mode: ParamMode

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != len(self.schema):
            raise ValueError("values must be (n, len(schema))")
        if len(self.labels) != len(self.values):
            raise ValueError("labels length must equal row count")

    def __len__(self) -> int:
        return len(self.values)

    def rows(self):
        """Iterate (WindowFeatures, Behavior) pairs."""
        for row, code in zip(self.values, self.labels):
            yield WindowFeatures(row, self.schema), Behavior(int(code))


def _block_fft_features(x: np.ndarray, starts: np.ndarray, config: FeatureConfig,
                        rate_hz: float) -> np.ndarray:
    """Per-window FFT features from the enclosing fixed block.

    Blocks tile the series at fft_block samples; a tail block shorter than
    MIN_FFT_BLOCK reuses the previous block's features.
    """
    block_of = starts // config.fft_block
    feats: dict[int, np.ndarray] = {}

    def block_features(b: int) -> np.ndarray:
        if b in feats:
            return feats[b]
        lo = b * config.fft_block
        seg = x[lo : lo + config.fft_block]
        if len(seg) < MIN_FFT_BLOCK:
            if b == 0:
                raise BlockTooShort(
                    f"series tail of {len(seg)} samples is the only spectral block"
                )
            feats[b] = block_features(b - 1)
        else:
            feats[b] = fft_features(seg, config.n_bands, rate_hz)
        return feats[b]

    return np.stack([block_features(int(b)) for b in block_of])


def build_feature_dataset(
    labeled: LabeledSeries,
    mode: ParamMode = ParamMode.STATS24,
    config: FeatureConfig | None = None,
) -> FeatureDataset:
    """One feature row per rolling window of the (normalized) series."""
    if config is None:
        config = FeatureConfig()
    starts = _window_starts(len(labeled), config.window_size, config.stride)
    values = labeled.series.values
    labels = (
        _window_labels(labeled.labels, starts, config.window_size)
        if len(starts)
        else np.empty(0, dtype=np.uint8)
    )
    if len(starts) == 0:
        schema = RAW6_SCHEMA if mode is ParamMode.RAW6 else STATS24_SCHEMA
        if mode is ParamMode.STATS24_FFT:
            schema = schema + fft_schema(config.n_bands)
        return FeatureDataset(np.empty((0, len(schema))), labels, schema, mode)
    stats = _batch_stats(values, starts, config.window_size)
    if mode is ParamMode.RAW6:
        means = stats[:, 3 :: len(STAT_NAMES)]
        return FeatureDataset(np.ascontiguousarray(means), labels, RAW6_SCHEMA, mode)
    if mode is ParamMode.STATS24:
        return FeatureDataset(stats, labels, STATS24_SCHEMA, mode)
    rate = labeled.series.nominal_rate_hz
    fft_cols = _block_fft_features(values[:, 0], starts, config, rate)
    return FeatureDataset(
        np.hstack((stats, fft_cols)),
        labels,
        STATS24_SCHEMA + fft_schema(config.n_bands),
        mode,
    )


# ---------------------------------------------------------------------------
# CSV interchange


def write_features_csv(dataset: FeatureDataset, path) -> None:
    """Header = schema + `label`; floats as repr for exact round-trips."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(dataset.schema) + ["label"])
        for row, code in zip(dataset.values, dataset.labels):
            writer.writerow([repr(float(v)) for v in row] + [Behavior(int(code)).token])


def read_features_csv(path) -> FeatureDataset:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[-1] != "label":
            raise ValueError(f"{path}: expected feature header ending in 'label'")
        schema = tuple(header[:-1])
        rows, codes = [], []
        for row in reader:
            if not row:
                continue
            rows.append([float(v) for v in row[:-1]])
            codes.append(Behavior.from_token(row[-1]).value)
    n_cols = len(schema)
    if n_cols == len(RAW6_SCHEMA) and schema == RAW6_SCHEMA:
        mode = ParamMode.RAW6
    elif schema == STATS24_SCHEMA:
        mode = ParamMode.STATS24
    else:
        mode = ParamMode.STATS24_FFT
    values = np.array(rows, dtype=np.float64).reshape(len(rows), n_cols)
    return FeatureDataset(values, np.array(codes, dtype=np.uint8), schema, mode)
