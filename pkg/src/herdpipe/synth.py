"""Labeled synthetic sensor data for pipeline testing.

Each behavior gets a signal profile on acc_x (oscillation center band,
amplitude, frequency band, noise); the remaining five channels reuse the
acc_x pattern with centers drawn in a ±50% band and independent noise and
phase. Feeding oscillates around a center in [2, 6], Ruminating around
[−3, −2], Lying is a flat line with sparse spikes, and Others is a bounded
random walk with higher variance than any oscillating class.

Day schedules are built from a fixed template (rumination bulk 18:00–05:00,
two daytime feeding blocks, midday lying, others filling the gaps), jittered
per day. Estrus days reallocate time toward Others at the expense of
Ruminating and Lying — a restlessness proxy the detector is meant to find.

All generators are pure functions of their seeds: each (cow, day) derives
its own RNG stream, so parallel and serial herd generation are identical.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSchedule
from .ingest import (
    Behavior,
    LabeledSeries,
    LabelSegment,
    SampleSeries,
    CHANNELS,
    LABEL_HEADER,
    NOMINAL_SPACING_MS,
    SENSOR_HEADER,
)

RATE_HZ = 2.0
SAMPLES_PER_MINUTE = 120
MINUTES_PER_DAY = 1440
SAMPLES_PER_DAY = MINUTES_PER_DAY * SAMPLES_PER_MINUTE  # 172,800
MS_PER_DAY = 86_400_000

# 2024-01-01T00:00:00Z; synthetic days are laid out consecutively from here.
DEFAULT_EPOCH_MS = 1_704_067_200_000

CALENDAR_HEADER = ("cow_id", "day_index", "is_estrus")


@dataclass(frozen=True)
class BehaviorProfile:
    """Signal shape parameters for one behavior.

    ``center_range`` bounds the acc_x oscillation center; ``amplitude`` is
    the oscillation half-range, reused as the half-width of the bounded
    walk when ``walk_step_std`` > 0. ``spike_rate_hz``/``spike_amplitude``
    add sparse transients (Lying head movements).
    """

    behavior: Behavior
    center_range: tuple[float, float]
    amplitude: float
    freq_hz: tuple[float, float] = (0.5, 1.5)
    noise_std: float = 0.1
    spike_rate_hz: float = 0.0
    spike_amplitude: float = 0.0
    walk_step_std: float = 0.0

    def __post_init__(self):
        if self.center_range[0] > self.center_range[1]:
            raise ValueError("center_range low must be <= high")
        if self.amplitude < 0 or self.noise_std < 0:
            raise ValueError("amplitude and noise_std must be >= 0")


def default_profiles() -> dict[Behavior, BehaviorProfile]:
    """Per-behavior profiles with disjoint Feeding/Ruminating acc_x bands."""
    return {
        Behavior.FEEDING: BehaviorProfile(
            Behavior.FEEDING, center_range=(2.0, 6.0), amplitude=1.0, noise_std=0.3
        ),
        Behavior.RUMINATING: BehaviorProfile(
            Behavior.RUMINATING, center_range=(-3.0, -2.0), amplitude=0.5, noise_std=0.2
        ),
        Behavior.LYING: BehaviorProfile(
            Behavior.LYING,
            center_range=(0.0, 0.0),
            amplitude=0.0,
            noise_std=0.05,
            spike_rate_hz=0.02,
            spike_amplitude=0.8,
        ),
        Behavior.OTHERS: BehaviorProfile(
            Behavior.OTHERS,
            center_range=(-1.0, 1.0),
            amplitude=4.0,
            noise_std=0.3,
            walk_step_std=0.3,
        ),
    }


@dataclass(frozen=True)
class ScheduleEntry:
    """One behavior block as a half-open minute-of-day interval."""

    start_min: int
    end_min: int
    behavior: Behavior


@dataclass(frozen=True)
class DaySchedule:
    """Ordered, non-overlapping behavior blocks within [0, 1440)."""

    entries: tuple[ScheduleEntry, ...]

    def validate(self) -> None:
        prev_end = 0
        for e in self.entries:
            if not (0 <= e.start_min < e.end_min <= MINUTES_PER_DAY):
                raise InvalidSchedule(f"block [{e.start_min}, {e.end_min}) out of bounds")
            if e.start_min < prev_end:
                raise InvalidSchedule(f"block at minute {e.start_min} overlaps previous")
            prev_end = e.end_min

    def minutes_by_behavior(self) -> dict[Behavior, int]:
        totals = {b: 0 for b in Behavior}
        for e in self.entries:
            totals[e.behavior] += e.end_min - e.start_min
        return totals


# (behavior, minutes) blocks; rumination bulk spans 18:00-24:00 and
# 00:00-05:00, feeding sits in two daytime blocks, lying at midday.
# Budgets: Ruminating 660, Feeding 240, Lying 180, Others 360 = 1440.
SCHEDULE_TEMPLATE: tuple[tuple[Behavior, int], ...] = (
    (Behavior.RUMINATING, 300),
    (Behavior.OTHERS, 90),
    (Behavior.FEEDING, 120),
    (Behavior.OTHERS, 90),
    (Behavior.LYING, 180),
    (Behavior.OTHERS, 60),
    (Behavior.FEEDING, 120),
    (Behavior.OTHERS, 120),
    (Behavior.RUMINATING, 360),
)

JITTER_RANGE = (0.85, 1.15)


def _round_preserving_total(values: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder rounding of nonnegative values summing to total."""
    floors = np.floor(values).astype(np.int64)
    frac = values - floors
    short = total - int(floors.sum())
    order = np.argsort(-frac, kind="stable")
    floors[order[:short]] += 1
    return floors


def make_day_schedule(
    rng: np.random.Generator,
    others_boost: float = 1.0,
    template: tuple[tuple[Behavior, int], ...] = SCHEDULE_TEMPLATE,
) -> DaySchedule:
    """Jitter the template and optionally boost the Others share.

    Each block duration is scaled by an independent uniform draw from
    JITTER_RANGE. With others_boost > 1, Others blocks grow by that factor
    and the excess is deducted from Ruminating and Lying proportionally
    (Feeding is untouched). Block minutes are then renormalized to a
    1440-minute day by largest-remainder rounding; blocks rounded to zero
    are dropped.
    """
    behaviors = [b for b, _ in template]
    raw = np.array([m for _, m in template], dtype=np.float64)
    raw *= rng.uniform(*JITTER_RANGE, size=len(raw))
    if others_boost < 1.0:
        raise InvalidSchedule(f"others_boost must be >= 1, got {others_boost}")
    if others_boost > 1.0:
        o_mask = np.array([b is Behavior.OTHERS for b in behaviors])
        rl_mask = np.array([b in (Behavior.RUMINATING, Behavior.LYING) for b in behaviors])
        extra = (others_boost - 1.0) * raw[o_mask].sum()
        donor = raw[rl_mask].sum()
        if extra >= donor:
            raise InvalidSchedule(
                f"others_boost {others_boost} would exhaust ruminating/lying time"
            )
        raw[o_mask] *= others_boost
        raw[rl_mask] *= 1.0 - extra / donor
    minutes = _round_preserving_total(raw * (MINUTES_PER_DAY / raw.sum()), MINUTES_PER_DAY)
    entries = []
    cursor = 0
    for b, m in zip(behaviors, minutes):
        if m > 0:
            entries.append(ScheduleEntry(cursor, cursor + int(m), b))
            cursor += int(m)
    return DaySchedule(tuple(entries))


def _reflect(walk: np.ndarray, low: float, high: float) -> np.ndarray:
    """Fold an unbounded walk into [low, high] by reflection at the bounds."""
    span = high - low
    y = np.mod(walk - low, 2.0 * span)
    return low + np.where(y <= span, y, 2.0 * span - y)


def _segment_signal(rng: np.random.Generator, profile: BehaviorProfile, n: int) -> np.ndarray:
    """Draw n samples of all six channels for one schedule block."""
    out = np.empty((n, len(CHANNELS)), dtype=np.float64)
    center0 = rng.uniform(*profile.center_range)
    freq = rng.uniform(*profile.freq_hz)
    t = np.arange(n, dtype=np.float64) / RATE_HZ
    for c in range(len(CHANNELS)):
        center = center0 if c == 0 else center0 * rng.uniform(0.5, 1.5)
        if profile.walk_step_std > 0.0 and profile.amplitude > 0.0:
            steps = rng.normal(0.0, profile.walk_step_std, n)
            out[:, c] = _reflect(
                center + np.cumsum(steps), center - profile.amplitude, center + profile.amplitude
            )
        else:
            phase = rng.uniform(0.0, 2.0 * np.pi)
            out[:, c] = center + profile.amplitude * np.sin(2.0 * np.pi * freq * t + phase)
        out[:, c] += rng.normal(0.0, profile.noise_std, n)
        if profile.spike_rate_hz > 0.0:
            k = int(rng.poisson(profile.spike_rate_hz * n / RATE_HZ))
            if k:
                pos = rng.integers(0, n, k)
                mag = profile.spike_amplitude * rng.uniform(0.5, 1.5, k)
                mag *= rng.choice((-1.0, 1.0), k)
                np.add.at(out[:, c], pos, mag)
    return out


def generate_day(
    seed,
    schedule: DaySchedule,
    profiles: dict[Behavior, BehaviorProfile] | None = None,
    start_ms: int = DEFAULT_EPOCH_MS,
) -> LabeledSeries:
    """Generate one labeled 24 h day (172,800 samples at 2 Hz).

    Samples are labeled exactly per the schedule; minutes the schedule
    leaves uncovered default to Others. Deterministic given the seed.
    """
    schedule.validate()
    if profiles is None:
        profiles = default_profiles()
    rng = np.random.default_rng(seed)
    values = np.empty((SAMPLES_PER_DAY, len(CHANNELS)), dtype=np.float64)
    labels = np.full(SAMPLES_PER_DAY, Behavior.OTHERS.value, dtype=np.uint8)
    # Uncovered stretches still need signal: expand to a gap-free block list.
    blocks: list[ScheduleEntry] = []
    cursor = 0
    for e in schedule.entries:
        if e.start_min > cursor:
            blocks.append(ScheduleEntry(cursor, e.start_min, Behavior.OTHERS))
        blocks.append(e)
        cursor = e.end_min
    if cursor < MINUTES_PER_DAY:
        blocks.append(ScheduleEntry(cursor, MINUTES_PER_DAY, Behavior.OTHERS))
    for e in blocks:
        lo, hi = e.start_min * SAMPLES_PER_MINUTE, e.end_min * SAMPLES_PER_MINUTE
        values[lo:hi] = _segment_signal(rng, profiles[e.behavior], hi - lo)
        labels[lo:hi] = e.behavior.value
    timestamps = start_ms + np.arange(SAMPLES_PER_DAY, dtype=np.int64) * NOMINAL_SPACING_MS
    return LabeledSeries(SampleSeries(timestamps, values), labels)


@dataclass(frozen=True)
class HerdSpec:
    """Shape of a synthetic herd dataset."""

    n_cows: int
    n_days: int
    estrus_days: frozenset[tuple[int, int]] = field(default_factory=frozenset)
    estrus_others_boost: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_cows < 1 or self.n_days < 1:
            raise ValueError("n_cows and n_days must be >= 1")
        if self.estrus_others_boost < 1.0:
            raise ValueError("estrus_others_boost must be >= 1")
        for cow, day in self.estrus_days:
            if not (0 <= cow < self.n_cows and 0 <= day < self.n_days):
                raise ValueError(f"estrus day ({cow}, {day}) outside herd")


@dataclass(frozen=True)
class CalendarEntry:
    cow_id: int
    day_index: int
    is_estrus: bool


def iter_herd_days(spec: HerdSpec, profiles=None, start_ms: int = DEFAULT_EPOCH_MS):
    """Yield (cow_id, day_index, LabeledSeries, is_estrus), cow-major.

    Each day draws from its own (seed, cow, day) RNG stream, so any
    subset of days can be regenerated independently and identically.
    """
    for cow in range(spec.n_cows):
        for day in range(spec.n_days):
            is_estrus = (cow, day) in spec.estrus_days
            boost = spec.estrus_others_boost if is_estrus else 1.0
            sched_rng = np.random.default_rng(
                np.random.SeedSequence([spec.seed, cow, day, 0])
            )
            schedule = make_day_schedule(sched_rng, others_boost=boost)
            series = generate_day(
                np.random.SeedSequence([spec.seed, cow, day, 1]),
                schedule,
                profiles,
                start_ms=start_ms + day * MS_PER_DAY,
            )
            yield cow, day, series, is_estrus


def generate_herd(
    spec: HerdSpec, profiles=None, start_ms: int = DEFAULT_EPOCH_MS
) -> tuple[dict[int, list[LabeledSeries]], list[CalendarEntry]]:
    """Materialize the whole herd plus its ground-truth estrus calendar.

    Holds every day in memory (~8 MB per day); for large herds prefer
    iter_herd_days and process each day as it is produced.
    """
    days: dict[int, list[LabeledSeries]] = {cow: [] for cow in range(spec.n_cows)}
    calendar: list[CalendarEntry] = []
    for cow, day, series, is_estrus in iter_herd_days(spec, profiles, start_ms):
        days[cow].append(series)
        calendar.append(CalendarEntry(cow, day, is_estrus))
    return days, calendar


def _fmt(v: float) -> str:
    # repr() keeps the shortest exact decimal so files round-trip bit-for-bit
    return repr(float(v))


def write_sensor_csv(labeled: LabeledSeries, data_path, label_path) -> None:
    """Write the sensor CSV and its behavior-segment label CSV.

    Labels are run-length compressed into half-open [start_ms, end_ms)
    segments; Others runs are omitted because readers default to Others.
    """
    series = labeled.series
    with open(data_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SENSOR_HEADER)
        for ts, row in zip(series.timestamps, series.values):
            writer.writerow([int(ts)] + [_fmt(v) for v in row])
    write_label_csv(label_segments(labeled), label_path)


def label_segments(labeled: LabeledSeries) -> list[LabelSegment]:
    """Run-length compress per-sample labels, dropping Others runs."""
    codes = labeled.labels
    ts = labeled.series.timestamps
    if len(codes) == 0:
        return []
    change = np.nonzero(np.diff(codes))[0] + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [len(codes)]))
    segments = []
    for s, e in zip(starts, ends):
        if codes[s] == Behavior.OTHERS.value:
            continue
        end_ms = int(ts[e]) if e < len(codes) else int(ts[-1]) + NOMINAL_SPACING_MS
        segments.append(LabelSegment(int(ts[s]), end_ms, Behavior(int(codes[s]))))
    return segments


def write_label_csv(segments: list[LabelSegment], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LABEL_HEADER)
        for seg in segments:
            writer.writerow([seg.start, seg.end, seg.behavior.token])


def write_calendar_csv(calendar: list[CalendarEntry], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CALENDAR_HEADER)
        for entry in calendar:
            writer.writerow([entry.cow_id, entry.day_index, int(entry.is_estrus)])


def read_calendar_csv(path) -> list[CalendarEntry]:
    entries = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CALENDAR_HEADER:
            raise ValueError(f"{path}: expected header {','.join(CALENDAR_HEADER)}")
        for row in reader:
            if not row:
                continue
            entries.append(CalendarEntry(int(row[0]), int(row[1]), bool(int(row[2]))))
    return entries
