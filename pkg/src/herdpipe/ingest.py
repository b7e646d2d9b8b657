"""Sensor and label file ingestion.

Reads the two input CSV formats (raw 2 Hz inertial samples and behavior
label segments), validates sampling cadence, and attaches one behavior
label per sample with "Others" as the default class for uncovered time.

Sensor CSV:  header ``timestamp,ax,ay,az,gx,gy,gz``; timestamp is epoch
milliseconds or an RFC 3339 string (normalized to epoch ms internally).
Label CSV:   header ``start_ms,end_ms,behavior``; intervals are half-open
``[start, end)`` so adjacent segments partition time without double
labeling.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum

import numpy as np

from .errors import (
    EmptyFile,
    EmptySeries,
    MalformedRow,
    NonMonotonicTimestamp,
    OverlappingSegments,
    UnknownBehavior,
)

NOMINAL_RATE_HZ = 2.0
NOMINAL_SPACING_MS = 500
CADENCE_BAND_MS = (400, 600)

CHANNELS = ("ax", "ay", "az", "gx", "gy", "gz")
SENSOR_HEADER = ("timestamp",) + CHANNELS
LABEL_HEADER = ("start_ms", "end_ms", "behavior")

# Physical plausibility bounds used by noise removal.
ACC_LIMIT_G = 16.0
GYRO_LIMIT_DPS = 2000.0


class Behavior(Enum):
    """The four behavior classes, in the fixed tie-break order."""

    FEEDING = 0
    RUMINATING = 1
    LYING = 2
    OTHERS = 3

    @classmethod
    def from_token(cls, token: str) -> "Behavior":
        try:
            return cls[token.strip().upper()]
        except KeyError:
            raise UnknownBehavior(token.strip()) from None

    @property
    def token(self) -> str:
        return self.name.lower()


BEHAVIORS = tuple(Behavior)
N_BEHAVIORS = len(BEHAVIORS)


@dataclass(frozen=True)
class SensorSample:
    """One timestamped 6-channel inertial reading.

    ``timestamp`` is epoch milliseconds UTC; accelerometer channels are in
    gravity units, gyroscope channels in degrees/second.
    """

    timestamp: int
    ax: float
    ay: float
    az: float
    gx: float
    gy: float
    gz: float


class SampleSeries:
    """Columnar series of sensor samples at a nominal 2 Hz cadence.

    Stores timestamps as an int64 array and channel values as an (n, 6)
    float64 array in CHANNELS order. Timestamps are strictly increasing.
    Instances are treated as immutable after construction.
    """

    __slots__ = ("timestamps", "values", "nominal_rate_hz")

    def __init__(self, timestamps, values, nominal_rate_hz: float = NOMINAL_RATE_HZ):
        ts = np.asarray(timestamps, dtype=np.int64)
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[1] != len(CHANNELS):
            raise ValueError(f"values must be (n, {len(CHANNELS)}), got {vals.shape}")
        if len(ts) != len(vals):
            raise ValueError("timestamps and values length mismatch")
        if len(ts) and ts.min() <= 0:
            raise ValueError("timestamps must be positive epoch milliseconds")
        if len(ts) > 1 and not (np.diff(ts) > 0).all():
            raise NonMonotonicTimestamp("timestamps must be strictly increasing")
        self.timestamps = ts
        self.values = vals
        self.nominal_rate_hz = float(nominal_rate_hz)

    def __len__(self) -> int:
        return len(self.timestamps)

    def __getitem__(self, i: int) -> SensorSample:
        return SensorSample(int(self.timestamps[i]), *map(float, self.values[i]))

    def channel(self, name: str) -> np.ndarray:
        return self.values[:, CHANNELS.index(name)]


@dataclass(frozen=True)
class LabelSegment:
    """Half-open behavior interval [start, end) in epoch milliseconds."""

    start: int
    end: int
    behavior: Behavior

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError(f"segment start {self.start} must be < end {self.end}")


class LabeledSeries:
    """A SampleSeries plus one behavior per sample (uint8 codes)."""

    __slots__ = ("series", "labels")

    def __init__(self, series: SampleSeries, labels):
        codes = np.asarray(labels, dtype=np.uint8)
        if len(codes) != len(series):
            raise ValueError("labels length must equal sample count")
        if len(codes) and codes.max() >= N_BEHAVIORS:
            raise ValueError("label codes out of range")
        self.series = series
        self.labels = codes

    def __len__(self) -> int:
        return len(self.series)

    def behavior_at(self, i: int) -> Behavior:
        return BEHAVIORS[self.labels[i]]


@dataclass(frozen=True)
class GapReport:
    """An inter-sample spacing outside the accepted cadence band."""

    start_ms: int
    end_ms: int
    gap_ms: int


def _parse_timestamp(token: str, line: int) -> int:
    """Parse epoch-ms integer or RFC 3339 string to epoch ms UTC."""
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        pass
    try:
        iso = token[:-1] + "+00:00" if token.endswith(("Z", "z")) else token
        dt = datetime.fromisoformat(iso)
    except ValueError:
        raise MalformedRow(line, f"bad timestamp {token!r}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return round(dt.timestamp() * 1000)


def read_sensor_csv(path) -> SampleSeries:
    """Read a sensor CSV into a SampleSeries sorted by timestamp.

    Raises MalformedRow (with its 1-based file line, header = line 1) for
    rows with the wrong field count or unparseable values,
    NonMonotonicTimestamp for duplicate timestamps, and EmptyFile when no
    data rows are present.
    """
    timestamps: list[int] = []
    rows: list[list[float]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyFile(f"{path} is empty")
        if tuple(h.strip() for h in header) != SENSOR_HEADER:
            raise MalformedRow(1, f"expected header {','.join(SENSOR_HEADER)}")
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(SENSOR_HEADER):
                raise MalformedRow(line, f"expected {len(SENSOR_HEADER)} fields, got {len(row)}")
            timestamps.append(_parse_timestamp(row[0], line))
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError:
                raise MalformedRow(line, "non-numeric channel value") from None
    if not rows:
        raise EmptyFile(f"{path} has no data rows")
    ts = np.array(timestamps, dtype=np.int64)
    vals = np.array(rows, dtype=np.float64)
    order = np.argsort(ts, kind="stable")
    ts, vals = ts[order], vals[order]
    if len(ts) > 1 and (np.diff(ts) == 0).any():
        dup = int(ts[np.nonzero(np.diff(ts) == 0)[0][0]])
        raise NonMonotonicTimestamp(f"duplicate timestamp {dup}")
    return SampleSeries(ts, vals)


def read_label_csv(path) -> list[LabelSegment]:
    """Read behavior label segments, sorted by start, overlaps rejected."""
    segments: list[LabelSegment] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyFile(f"{path} is empty")
        if tuple(h.strip() for h in header) != LABEL_HEADER:
            raise MalformedRow(1, f"expected header {','.join(LABEL_HEADER)}")
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise MalformedRow(line, f"expected 3 fields, got {len(row)}")
            try:
                start, end = int(row[0]), int(row[1])
            except ValueError:
                raise MalformedRow(line, "non-integer segment bound") from None
            behavior = Behavior.from_token(row[2])
            try:
                segments.append(LabelSegment(start, end, behavior))
            except ValueError as exc:
                raise MalformedRow(line, str(exc)) from None
    segments.sort(key=lambda s: s.start)
    for i in range(len(segments) - 1):
        if segments[i].end > segments[i + 1].start:
            raise OverlappingSegments(i, i + 1)
    return segments


def attach_labels(series: SampleSeries, segments: list[LabelSegment]) -> LabeledSeries:
    """Label every sample from the covering segment, Others elsewhere.

    Membership uses the half-open convention: a sample at exactly
    ``segment.end`` is not inside. Segment order does not matter as long
    as segments do not overlap.
    """
    ordered = sorted(segments, key=lambda s: s.start)
    for i in range(len(ordered) - 1):
        if ordered[i].end > ordered[i + 1].start:
            raise OverlappingSegments(i, i + 1)
    labels = np.full(len(series), Behavior.OTHERS.value, dtype=np.uint8)
    if ordered:
        starts = np.array([s.start for s in ordered], dtype=np.int64)
        ends = np.array([s.end for s in ordered], dtype=np.int64)
        codes = np.array([s.behavior.value for s in ordered], dtype=np.uint8)
        idx = np.searchsorted(starts, series.timestamps, side="right") - 1
        clipped = np.clip(idx, 0, None)
        covered = (idx >= 0) & (series.timestamps < ends[clipped])
        labels[covered] = codes[clipped[covered]]
    return LabeledSeries(series, labels)


def validate_cadence(series: SampleSeries) -> list[GapReport]:
    """Report every inter-sample spacing outside [fast, slow] ms.

    Pure inspection: gaps are reported, never interpolated or filled.
    """
    if len(series) == 0:
        raise EmptySeries("cannot validate cadence of an empty series")
    fast, slow = CADENCE_BAND_MS
    gaps = np.diff(series.timestamps)
    bad = np.nonzero((gaps < fast) | (gaps > slow))[0]
    return [
        GapReport(int(series.timestamps[i]), int(series.timestamps[i + 1]), int(gaps[i]))
        for i in bad
    ]


def remove_noise(
    series: SampleSeries,
    acc_limit: float = ACC_LIMIT_G,
    gyro_limit: float = GYRO_LIMIT_DPS,
) -> tuple[SampleSeries, int]:
    """Drop non-finite rows and rows outside physical plausibility bounds.

    Returns the cleaned series and the number of rows dropped.
    """
    vals = series.values
    keep = np.isfinite(vals).all(axis=1)
    keep &= (np.abs(vals[:, :3]) <= acc_limit).all(axis=1)
    keep &= (np.abs(vals[:, 3:]) <= gyro_limit).all(axis=1)
    dropped = int(len(series) - keep.sum())
    if dropped == 0:
        return series, 0
    return SampleSeries(series.timestamps[keep], vals[keep], series.nominal_rate_hz), dropped
