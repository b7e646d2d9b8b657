"""Reduce window predictions to per-sample labels and activity summaries.

Overlapping windows vote per sample (majority; ties go to the
latest-starting covering window); smooth_minutes then removes sub-minute
prediction flicker by a second majority vote per wall-clock minute. Each
labeled 2 Hz sample contributes 0.5 s to its behavior in its hour bucket.
Sample counts are kept as integers all the way so minute totals conserve
exactly, and hours with zero coverage are emitted with a coverage_s of 0
for the estrus detector to mask.

The hourly CSV (`day,hour,feeding_min,ruminating_min,lying_min,
others_min,coverage_s`) is the interchange format between classification
and estrus detection.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .classify import Prediction
from .features import Window
from .ingest import BEHAVIORS, Behavior, N_BEHAVIORS

MS_PER_HOUR = 3_600_000
MS_PER_MINUTE = 60_000
SAMPLES_PER_MINUTE = 120
SECONDS_PER_SAMPLE = 0.5
_EPOCH_DATE = date(1970, 1, 1)

HOURLY_HEADER = (
    "day",
    "hour",
    "feeding_min",
    "ruminating_min",
    "lying_min",
    "others_min",
    "coverage_s",
)


@dataclass(frozen=True)
class HourlySummary:
    """Per-behavior sample counts within one clock hour.

    ``counts`` holds integer 2 Hz sample counts in behavior order, so
    minute figures derive exactly: minutes = counts/120, coverage =
    counts·0.5 s.
    """

    day: date
    hour: int
    counts: np.ndarray

    @property
    def minutes(self) -> dict[Behavior, float]:
        return {b: float(self.counts[b.value]) / SAMPLES_PER_MINUTE for b in BEHAVIORS}

    @property
    def coverage_s(self) -> float:
        return float(self.counts.sum()) * SECONDS_PER_SAMPLE


@dataclass(frozen=True)
class DailySummary:
    """Sum of one day's hourly summaries."""

    day: date
    counts: np.ndarray

    @property
    def minutes(self) -> dict[Behavior, float]:
        return {b: float(self.counts[b.value]) / SAMPLES_PER_MINUTE for b in BEHAVIORS}


@dataclass(frozen=True)
class HourlyRow:
    """One hourly CSV record; the classify → estrus interchange type."""

    day: date
    hour: int
    feeding_min: float
    ruminating_min: float
    lying_min: float
    others_min: float
    coverage_s: float

    def minute_of(self, behavior: Behavior) -> float:
        return (
            self.feeding_min,
            self.ruminating_min,
            self.lying_min,
            self.others_min,
        )[behavior.value]


def _labels_from_starts(
    starts: np.ndarray, codes: np.ndarray, size: int, n: int
) -> np.ndarray:
    """Per-sample majority vote over covering windows.

    Ties take the tied class covered by the latest-starting window;
    samples no window covers inherit the nearest preceding window's label
    (the first window's, ahead of it).
    """
    t = np.arange(n, dtype=np.int64)
    votes = np.empty((n, N_BEHAVIORS), dtype=np.int64)
    latest = np.empty((n, N_BEHAVIORS), dtype=np.int64)
    for c in range(N_BEHAVIORS):
        s_c = starts[codes == c]
        hi = np.searchsorted(s_c, t, side="right")
        lo = np.searchsorted(s_c, t - size, side="right")
        votes[:, c] = hi - lo
        cand = s_c[np.maximum(hi - 1, 0)] if len(s_c) else np.full(n, -1, dtype=np.int64)
        covering = (hi > 0) & (cand > t - size) if len(s_c) else np.zeros(n, dtype=bool)
        latest[:, c] = np.where(covering, cand, -1)
    top = votes.max(axis=1, keepdims=True)
    score = np.where(votes == top, latest, -1)
    labels = score.argmax(axis=1).astype(np.uint8)
    uncovered = top[:, 0] == 0
    if uncovered.any():
        idx = np.searchsorted(starts, t[uncovered], side="right") - 1
        labels[uncovered] = codes[np.maximum(idx, 0)]
    return labels


def labels_per_sample(
    windows: list[tuple[Window, Prediction]], n_samples: int | None = None
) -> np.ndarray:
    """One behavior code per sample from (window, prediction) pairs.

    Windows must be sorted by start. ``n_samples`` extends labeling past
    the last window (trailing samples take its prediction); by default the
    sequence ends where the last window does.
    """
    if not windows:
        if n_samples in (None, 0):
            return np.empty(0, dtype=np.uint8)
        raise ValueError("cannot label samples without any window")
    starts = np.array([w.start for w, _ in windows], dtype=np.int64)
    if (np.diff(starts) < 0).any():
        raise ValueError("windows must be sorted by start")
    codes = np.array([p.behavior.value for _, p in windows], dtype=np.uint8)
    size = len(windows[0][0].samples)
    n = int(starts[-1]) + size if n_samples is None else int(n_samples)
    return _labels_from_starts(starts, codes, size, n)


def smooth_minutes(timestamps: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Replace each wall-clock minute's labels with that minute's majority.

    Behaviors persist for minutes, so second-scale label flicker is
    classifier noise; voting per minute bucket removes it without moving
    any time across hour boundaries (minute buckets nest in hours). Ties
    break toward the lowest behavior code, the classifier's tie order.
    """
    ts = np.asarray(timestamps, dtype=np.int64)
    codes = np.asarray(labels, dtype=np.int64)
    if len(ts) != len(codes):
        raise ValueError("timestamps and labels length mismatch")
    if len(ts) == 0:
        return np.empty(0, dtype=np.uint8)
    if (np.diff(ts) < 0).any():
        raise ValueError("timestamps must be sorted")
    minutes = ts // MS_PER_MINUTE
    first = int(minutes[0])
    counts = np.zeros((int(minutes[-1]) - first + 1, N_BEHAVIORS), dtype=np.int64)
    np.add.at(counts, (minutes - first, codes), 1)
    return counts.argmax(axis=1).astype(np.uint8)[minutes - first]


def _hour_to_date(hour_abs: int) -> tuple[date, int]:
    day_abs, hour = divmod(hour_abs, 24)
    return _EPOCH_DATE + timedelta(days=day_abs), hour


def summarize_hourly(
    timestamps: np.ndarray, labels: np.ndarray, tz_offset_hours: int = 0
) -> list[HourlySummary]:
    """Bucket 0.5 s per sample into clock hours (UTC + optional offset).

    Every hour between the first and last observed is emitted, including
    zero-coverage ones. Gaps only reduce coverage; nothing is imputed.
    """
    ts = np.asarray(timestamps, dtype=np.int64)
    codes = np.asarray(labels, dtype=np.int64)
    if len(ts) != len(codes):
        raise ValueError("timestamps and labels length mismatch")
    if len(ts) == 0:
        return []
    if (np.diff(ts) < 0).any():
        raise ValueError("timestamps must be sorted")
    hours_abs = (ts + tz_offset_hours * MS_PER_HOUR) // MS_PER_HOUR
    first = int(hours_abs[0])
    n_hours = int(hours_abs[-1]) - first + 1
    counts = np.zeros((n_hours, N_BEHAVIORS), dtype=np.int64)
    np.add.at(counts, (hours_abs - first, codes), 1)
    out = []
    for i in range(n_hours):
        day, hour = _hour_to_date(first + i)
        out.append(HourlySummary(day, hour, counts[i]))
    return out


def summarize_daily(hourly: list[HourlySummary]) -> list[DailySummary]:
    """Per-day sum over hourly summaries, in first-appearance order."""
    totals: dict[date, np.ndarray] = {}
    for h in hourly:
        totals.setdefault(h.day, np.zeros(N_BEHAVIORS, dtype=np.int64))
        totals[h.day] += h.counts
    return [DailySummary(day, counts) for day, counts in totals.items()]


def _as_row(item) -> HourlyRow:
    if isinstance(item, HourlyRow):
        return item
    minutes = item.counts / SAMPLES_PER_MINUTE
    return HourlyRow(
        item.day,
        item.hour,
        float(minutes[0]),
        float(minutes[1]),
        float(minutes[2]),
        float(minutes[3]),
        item.coverage_s,
    )


def write_hourly_csv(items, path) -> None:
    """Write hourly summaries (or rows) to the interchange CSV."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HOURLY_HEADER)
        for item in items:
            row = _as_row(item)
            writer.writerow(
                [
                    row.day.isoformat(),
                    row.hour,
                    repr(row.feeding_min),
                    repr(row.ruminating_min),
                    repr(row.lying_min),
                    repr(row.others_min),
                    repr(row.coverage_s),
                ]
            )


def read_hourly_csv(path) -> list[HourlyRow]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != HOURLY_HEADER:
            raise ValueError(f"{path}: expected header {','.join(HOURLY_HEADER)}")
        for raw in reader:
            if not raw:
                continue
            rows.append(
                HourlyRow(
                    date.fromisoformat(raw[0]),
                    int(raw[1]),
                    float(raw[2]),
                    float(raw[3]),
                    float(raw[4]),
                    float(raw[5]),
                    float(raw[6]),
                )
            )
    return rows
