"""Command-line pipeline: synth → train-classifier → classify → summarize
→ train-estrus → detect → eval, composed through documented CSV and model
files only.

Exit codes: 0 success; 2 configuration problem or missing input; 3 model/
feature schema or version mismatch; 1 any other runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from . import classify as clf
from . import estrus as est
from . import features as feat
from . import ingest
from . import summarize as summ
from . import synth
from .config import PipelineConfig, resolve_config
from .errors import (
    CalendarMismatch,
    ConfigError,
    EmptyFile,
    InvalidSchedule,
    PipelineError,
    SchemaMismatch,
    VersionMismatch,
)

SENSOR_SUFFIX = ".sensor.csv"
LABELS_SUFFIX = ".labels.csv"
PRED_SUFFIX = ".pred.csv"


def day_file_name(cow: int, day: int, suffix: str = SENSOR_SUFFIX) -> str:
    return f"cow{cow:02d}_day{day:03d}{suffix}"


def _sibling(path: Path, suffix: str) -> Path:
    name = path.name
    if name.endswith(SENSOR_SUFFIX):
        return path.with_name(name[: -len(SENSOR_SUFFIX)] + suffix)
    return path.with_name(name + suffix)


def _require(path: Path) -> Path:
    if not path.exists():
        raise FileNotFoundError(f"{path} does not exist")
    return path


def _load_labeled_day(sensor_path: Path, labels_path: Path) -> ingest.LabeledSeries:
    series = ingest.read_sensor_csv(_require(sensor_path))
    series, dropped = ingest.remove_noise(series)
    if dropped:
        print(f"note: dropped {dropped} noisy rows from {sensor_path.name}", file=sys.stderr)
    gaps = ingest.validate_cadence(series)
    if gaps:
        print(f"note: {len(gaps)} cadence gaps in {sensor_path.name}", file=sys.stderr)
    segments = ingest.read_label_csv(_require(labels_path))
    return ingest.attach_labels(series, segments)


# ---------------------------------------------------------------------------
# synth


def _parse_estrus_days(text: str | None) -> set[tuple[int, int]]:
    """Comma-separated day indices (cow 0) or cow:day pairs."""
    days: set[tuple[int, int]] = set()
    if not text:
        return days
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            if ":" in item:
                cow_s, day_s = item.split(":", 1)
                days.add((int(cow_s), int(day_s)))
            else:
                days.add((0, int(item)))
        except ValueError:
            raise ConfigError(f"bad estrus day entry {item!r}") from None
    return days


def cmd_synth(args) -> int:
    cfg = resolve_config(args.config, {"seed": args.seed, "boost": args.boost})
    estrus_days = _parse_estrus_days(args.estrus_days)
    try:
        spec = synth.HerdSpec(
            n_cows=args.cows,
            n_days=args.days,
            estrus_days=frozenset(estrus_days),
            estrus_others_boost=cfg.boost,
            seed=cfg.seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    calendar = []
    for cow, day, series, is_estrus in synth.iter_herd_days(spec):
        synth.write_sensor_csv(
            series,
            out / day_file_name(cow, day),
            out / day_file_name(cow, day, LABELS_SUFFIX),
        )
        calendar.append(synth.CalendarEntry(cow, day, is_estrus))
    synth.write_calendar_csv(calendar, out / "calendar.csv")
    n_estrus = sum(e.is_estrus for e in calendar)
    print(f"wrote {len(calendar)} day files to {out} ({n_estrus} estrus days)")
    return 0


# ---------------------------------------------------------------------------
# train-classifier


def _discover_day_pairs(data_dir: Path) -> list[tuple[Path, Path]]:
    sensors = sorted(_require(data_dir).glob(f"*{SENSOR_SUFFIX}"))
    if not sensors:
        raise FileNotFoundError(f"no *{SENSOR_SUFFIX} files in {data_dir}")
    return [(s, _require(_sibling(s, LABELS_SUFFIX))) for s in sensors]


def cmd_train_classifier(args) -> int:
    cfg = resolve_config(
        args.config,
        {
            "mode": args.mode,
            "stride": args.stride,
            "window_size": args.window_size,
            "train_frac": args.train_frac,
            "n_trees": args.n_trees,
            "max_depth": args.max_depth,
            "min_samples_leaf": args.min_samples_leaf,
            "features_per_split": args.features_per_split,
            "seed": args.seed,
        },
    )
    fcfg = cfg.feature_config()
    mode = cfg.param_mode()
    days = [
        _load_labeled_day(sensor, labels)
        for sensor, labels in _discover_day_pairs(Path(args.data))
    ]
    per_day_rows = [
        len(feat._window_starts(len(d), fcfg.window_size, fcfg.stride)) for d in days
    ]
    total = sum(per_day_rows)
    cut = int(total * cfg.train_frac)
    if cut < 1 or cut >= total:
        raise ConfigError("train_frac leaves an empty train or evaluation side")
    # z-score is fit only on samples preceding the first held-out window
    fit_parts = []
    remaining = cut
    for day, n_rows in zip(days, per_day_rows):
        if remaining >= n_rows:
            fit_parts.append(day.series.values)
            remaining -= n_rows
        else:
            first_eval_start = remaining * fcfg.stride
            if first_eval_start:
                fit_parts.append(day.series.values[:first_eval_start])
            break
    fit_values = np.concatenate(fit_parts)
    stats = feat.ZScoreStats(fit_values.mean(axis=0), fit_values.std(axis=0))
    parts = []
    for day in days:
        normalized = ingest.LabeledSeries(
            feat.apply_zscore(day.series, stats), day.labels
        )
        parts.append(feat.build_feature_dataset(normalized, mode, fcfg))
    dataset = feat.FeatureDataset(
        np.concatenate([p.values for p in parts]),
        np.concatenate([p.labels for p in parts]),
        parts[0].schema,
        mode,
    )
    train_ds = feat.FeatureDataset(
        dataset.values[:cut], dataset.labels[:cut], dataset.schema, mode
    )
    eval_ds = feat.FeatureDataset(
        dataset.values[cut:], dataset.labels[cut:], dataset.schema, mode
    )
    extras = {
        "zscore": stats.to_dict(),
        "feature": {
            "mode": mode.value,
            "window_size": fcfg.window_size,
            "stride": fcfg.stride,
            "fft_block": fcfg.fft_block,
            "n_bands": fcfg.n_bands,
        },
    }
    model = clf.train_forest(train_ds, cfg.forest_config(), cfg.seed, extras)
    clf.save_model(model, args.out)
    train_report = clf.evaluate(model, train_ds)
    eval_report = clf.evaluate(model, eval_ds)
    baseline = clf.majority_baseline_accuracy(train_ds, eval_ds)
    print(f"trained {cfg.n_trees} trees on {len(train_ds)} windows -> {args.out}")
    print(f"training accuracy:  {train_report.accuracy:.4f}")
    print(f"held-out accuracy:  {eval_report.accuracy:.4f}")
    print(f"majority baseline:  {baseline:.4f}")
    ranked = clf.feature_importance(model)
    if ranked:
        top = ", ".join(f"{name}={value:.3f}" for name, value in ranked[:5])
        print(f"top features: {top}")
    return 0


# ---------------------------------------------------------------------------
# classify


def cmd_classify(args) -> int:
    model = clf.load_model(_require(Path(args.model)))
    meta = model.extras.get("feature")
    zs = model.extras.get("zscore")
    if not meta or not zs:
        raise ConfigError(f"{args.model} lacks preprocessing metadata")
    stats = feat.ZScoreStats.from_dict(zs)
    fcfg = feat.FeatureConfig(
        window_size=int(meta["window_size"]),
        stride=int(meta["stride"]),
        fft_block=int(meta["fft_block"]),
        n_bands=int(meta["n_bands"]),
    )
    mode = feat.ParamMode(args.mode) if args.mode else feat.ParamMode(meta["mode"])
    for name in sorted(args.data):
        path = Path(name)
        series = ingest.read_sensor_csv(_require(path))
        series, _ = ingest.remove_noise(series)
        normalized = feat.apply_zscore(series, stats)
        placeholder = np.zeros(len(series), dtype=np.uint8)
        ds = feat.build_feature_dataset(
            ingest.LabeledSeries(normalized, placeholder), mode, fcfg
        )
        codes, _ = clf.predict_batch(model, ds.values)
        starts = feat._window_starts(len(series), fcfg.window_size, fcfg.stride)
        sample_codes = summ._labels_from_starts(
            starts, codes, fcfg.window_size, len(series)
        )
        sample_codes = summ.smooth_minutes(series.timestamps, sample_codes)
        out_path = _sibling(path, PRED_SUFFIX)
        synth.write_label_csv(
            synth.label_segments(ingest.LabeledSeries(series, sample_codes)), out_path
        )
        print(f"{path.name}: {len(ds)} windows -> {out_path.name}")
    return 0


# ---------------------------------------------------------------------------
# summarize


def cmd_summarize(args) -> int:
    cfg = resolve_config(args.config, {"tz_offset": args.tz_offset})
    all_ts = []
    all_codes = []
    for name in sorted(args.sensors):
        path = Path(name)
        series = ingest.read_sensor_csv(_require(path))
        segments = ingest.read_label_csv(_require(_sibling(path, args.labels_suffix)))
        labeled = ingest.attach_labels(series, segments)
        all_ts.append(series.timestamps)
        all_codes.append(labeled.labels)
    timestamps = np.concatenate(all_ts)
    codes = np.concatenate(all_codes)
    order = np.argsort(timestamps, kind="stable")
    hourly = summ.summarize_hourly(timestamps[order], codes[order], cfg.tz_offset)
    summ.write_hourly_csv(hourly, args.out)
    daily = summ.summarize_daily(hourly)
    print(f"wrote {len(hourly)} hourly rows to {args.out}")
    for day in daily:
        minutes = day.minutes
        parts = ", ".join(
            f"{b.token} {minutes[b]:.1f}" for b in ingest.BEHAVIORS
        )
        print(f"{day.day.isoformat()}: {parts}")
    return 0


# ---------------------------------------------------------------------------
# train-estrus


def cmd_train_estrus(args) -> int:
    cfg = resolve_config(
        args.config,
        {
            "val_frac": args.val_frac,
            "quantile": args.quantile,
            "lookback": args.lookback,
            "hidden_size": args.hidden_size,
            "epochs": args.epochs,
            "learning_rate": args.learning_rate,
            "min_anomaly_hours": args.min_anomaly_hours,
            "seed": args.seed,
        },
    )
    rows = summ.read_hourly_csv(_require(Path(args.hourly)))
    cut = int(len(rows) * (1.0 - cfg.val_frac))
    if cut < cfg.lookback + 1:
        raise ConfigError(
            f"{cut} training rows cannot cover a {cfg.lookback}-hour lookback"
        )
    train_rows, val_rows = rows[:cut], rows[cut - cfg.lookback :]
    scaler = est.fit_row_scaler(train_rows)
    sequences = est.make_sequences(train_rows, scaler, cfg.lookback)
    result = est.lstm_train(sequences, cfg.lstm_config())
    threshold = est.calibrate_threshold(
        result.model, scaler, val_rows, cfg.quantile, cfg.lookback
    )
    est.save_lstm(
        result.model,
        scaler,
        threshold,
        args.out,
        min_anomaly_hours=cfg.min_anomaly_hours,
        lookback=cfg.lookback,
    )
    print(
        f"trained on {len(sequences)} sequences in {result.epochs_run} epochs "
        f"(final loss {result.final_loss:.3e})"
    )
    print(f"threshold (q={cfg.quantile}): {threshold:.6e} -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# detect


def _shahriar_records(rows, history, delta_threshold):
    combined = list(history) + list(rows)
    series = est.shahriar_delta_series(combined)
    lagged_mean = {
        t: float(np.mean([series.gamma[t - lag] for lag in est.DELTA_LAGS]))
        for t in range(max(est.DELTA_LAGS), len(combined))
    }
    records = []
    for t in range(len(combined)):
        if t < len(history) or not series.valid[t]:
            continue
        records.append(
            est.AnomalyRecord(
                series.days[t],
                series.hours[t],
                lagged_mean[t],
                float(series.gamma[t]),
                float(series.delta[t]),
                bool(series.delta[t] > delta_threshold),
            )
        )
    return records


def cmd_detect(args) -> int:
    cfg = resolve_config(
        args.config,
        {
            "delta_threshold": args.delta_threshold,
            "min_anomaly_hours": args.min_anomaly_hours,
        },
    )
    rows = summ.read_hourly_csv(_require(Path(args.hourly)))
    history: list[summ.HourlyRow] = []
    if args.baseline == "shahriar":
        if args.history:
            history = summ.read_hourly_csv(_require(Path(args.history)))[
                -max(est.DELTA_LAGS) :
            ]
        records = _shahriar_records(rows, history, cfg.delta_threshold)
        min_hours = (
            args.min_anomaly_hours
            if args.min_anomaly_hours is not None
            else cfg.min_anomaly_hours
        )
    else:
        bundle = est.load_lstm(_require(Path(args.model)))
        if args.history:
            history = summ.read_hourly_csv(_require(Path(args.history)))[
                -bundle.lookback :
            ]
        records = est.detect_anomalies(
            bundle.model,
            bundle.scaler,
            rows,
            bundle.threshold,
            bundle.lookback,
            history,
        )
        min_hours = (
            args.min_anomaly_hours
            if args.min_anomaly_hours is not None
            else bundle.min_anomaly_hours
        )
    verdicts = est.flag_estrus(records, min_hours)
    est.write_anomaly_csv(records, args.anomalies)
    est.write_verdict_csv(verdicts, args.verdicts)
    print("day          anomaly_hours  is_heat")
    for v in verdicts:
        print(f"{v.day.isoformat()}   {v.anomaly_hours:13d}  {'yes' if v.is_heat else 'no'}")
    return 0


# ---------------------------------------------------------------------------
# eval


def _two_sig_percent(fraction: float) -> str:
    return f"{fraction * 100:.2g}%"


def cmd_eval(args) -> int:
    verdicts = est.read_verdict_csv(_require(Path(args.verdicts)))
    if not verdicts:
        raise CalendarMismatch("prediction set is empty")
    calendar = synth.read_calendar_csv(_require(Path(args.calendar)))
    start = date.fromisoformat(args.start_day)
    truth = {
        start + timedelta(days=e.day_index): e.is_estrus
        for e in calendar
        if e.cow_id == args.cow
    }
    for v in verdicts:
        if v.day not in truth:
            raise CalendarMismatch(f"calendar does not cover predicted day {v.day}")
    heat_days = [v for v in verdicts if truth[v.day]]
    normal_days = [v for v in verdicts if not truth[v.day]]
    caught = sum(v.is_heat for v in heat_days)
    false_pos = sum(v.is_heat for v in normal_days)
    correct = caught + (len(normal_days) - false_pos)
    accuracy = correct / len(verdicts)
    metrics: list[tuple[str, float]] = []
    if heat_days:
        sensitivity = caught / len(heat_days)
        metrics.append(("sensitivity", sensitivity))
        print(f"heat days detected: {caught}/{len(heat_days)} (sensitivity {sensitivity:.3f})")
    if normal_days:
        specificity = (len(normal_days) - false_pos) / len(normal_days)
        metrics.append(("specificity", specificity))
        print(
            f"normal days kept:   {len(normal_days) - false_pos}/{len(normal_days)} "
            f"(specificity {specificity:.3f})"
        )
    metrics.append(("day_accuracy", accuracy))
    print(f"day-level accuracy: {accuracy:.4f} ({_two_sig_percent(accuracy)})")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.sensors:
        confusion = np.zeros((ingest.N_BEHAVIORS, ingest.N_BEHAVIORS), dtype=np.int64)
        for name in sorted(args.sensors):
            path = Path(name)
            series = ingest.read_sensor_csv(_require(path))
            true_segments = ingest.read_label_csv(_require(_sibling(path, args.truth_suffix)))
            pred_segments = ingest.read_label_csv(_require(_sibling(path, args.pred_suffix)))
            y_true = ingest.attach_labels(series, true_segments).labels.astype(np.int64)
            y_pred = ingest.attach_labels(series, pred_segments).labels.astype(np.int64)
            np.add.at(confusion, (y_true, y_pred), 1)
        clf_acc = float(np.trace(confusion) / confusion.sum())
        metrics.append(("classifier_accuracy", clf_acc))
        print(f"classifier sample accuracy: {clf_acc:.4f}")
        print("confusion (rows = truth, cols = predicted):")
        names = [b.token for b in ingest.BEHAVIORS]
        print("            " + "  ".join(f"{n:>10}" for n in names))
        for i, n in enumerate(names):
            cells = "  ".join(f"{confusion[i, j]:10d}" for j in range(len(names)))
            print(f"{n:>10}  {cells}")
    import csv as _csv

    with open(out_dir / "metrics.csv", "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        writer.writerow(("metric", "value"))
        for name, value in metrics:
            writer.writerow((name, repr(float(value))))
    if args.hourly:
        rows = summ.read_hourly_csv(_require(Path(args.hourly)))
        series = est.shahriar_delta_series(rows)
        with open(out_dir / "plot_others.csv", "w", newline="", encoding="utf-8") as fh:
            writer = _csv.writer(fh, lineterminator="\n")
            writer.writerow(("day", "hour", "others_min"))
            for r in rows:
                writer.writerow((r.day.isoformat(), r.hour, repr(r.others_min)))
        with open(out_dir / "plot_delta.csv", "w", newline="", encoding="utf-8") as fh:
            writer = _csv.writer(fh, lineterminator="\n")
            writer.writerow(("day", "hour", "delta"))
            for i in range(len(rows)):
                if series.valid[i]:
                    writer.writerow(
                        (series.days[i].isoformat(), series.hours[i], repr(float(series.delta[i])))
                    )
    if args.anomalies:
        records = est.read_anomaly_csv(_require(Path(args.anomalies)))
        with open(out_dir / "plot_sqerror.csv", "w", newline="", encoding="utf-8") as fh:
            writer = _csv.writer(fh, lineterminator="\n")
            writer.writerow(("day", "hour", "sq_error"))
            for r in records:
                writer.writerow((r.day.isoformat(), r.hour, repr(r.sq_error)))
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="herdpipe",
        description="Cattle behavior classification and estrus detection pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", help="key=value config file (TOML-compatible subset)")

    p = sub.add_parser("synth", help="generate a labeled synthetic herd dataset")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--cows", type=int, default=1, help="number of cows (default 1)")
    p.add_argument("--days", type=int, default=30, help="days per cow (default 30)")
    p.add_argument(
        "--estrus-days",
        help="comma-separated day indices (cow 0) or cow:day pairs, e.g. 12,19 or 1:5",
    )
    p.add_argument("--boost", type=float, help="Others-share multiplier on estrus days (default 2.0)")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    add_config(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train-classifier", help="train the behavior random forest")
    p.add_argument("--data", required=True, help="directory of *.sensor.csv/*.labels.csv days")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--mode", choices=["raw6", "stats24", "stats24fft"], help="feature set (default stats24)")
    p.add_argument("--stride", type=int, help="window stride (default 10)")
    p.add_argument("--window-size", type=int, help="window size (default 10)")
    p.add_argument("--train-frac", type=float, help="chronological train fraction (default 0.7)")
    p.add_argument("--n-trees", type=int, help="forest size (default 100)")
    p.add_argument("--max-depth", type=int, help="tree depth cap (default 16)")
    p.add_argument("--min-samples-leaf", type=int, help="leaf size floor (default 5)")
    p.add_argument("--features-per-split", type=int, help="candidate features per split (default floor(sqrt(d)))")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    add_config(p)
    p.set_defaults(func=cmd_train_classifier)

    p = sub.add_parser("classify", help="predict behavior segments for sensor files")
    p.add_argument("--model", required=True, help="forest model file")
    p.add_argument("--mode", choices=["raw6", "stats24", "stats24fft"], help="override the model's stored feature mode")
    p.add_argument("data", nargs="+", help="sensor CSV files")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("summarize", help="hourly activity minutes from label segments")
    p.add_argument("--out", required=True, help="hourly CSV to write")
    p.add_argument(
        "--labels-suffix",
        default=PRED_SUFFIX,
        help=f"label file suffix per sensor file (default {PRED_SUFFIX})",
    )
    p.add_argument("--tz-offset", type=int, help="hour-bucket offset from UTC (default 0)")
    p.add_argument("sensors", nargs="+", help="sensor CSV files")
    add_config(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("train-estrus", help="train the LSTM and calibrate its threshold")
    p.add_argument("--hourly", required=True, help="hourly CSV of normal (non-estrus) days")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--val-frac", type=float, help="trailing validation fraction (default 0.2)")
    p.add_argument("--quantile", type=float, help="error quantile for the threshold (default 0.99)")
    p.add_argument("--lookback", type=int, help="sequence length in hours (default 72)")
    p.add_argument("--hidden-size", type=int, help="LSTM width (default 32)")
    p.add_argument("--epochs", type=int, help="max training epochs (default 2000)")
    p.add_argument("--learning-rate", type=float, help="Adam step size (default 1e-3)")
    p.add_argument("--min-anomaly-hours", type=int, help="day heat threshold (default 3)")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    add_config(p)
    p.set_defaults(func=cmd_train_estrus)

    p = sub.add_parser("detect", help="flag anomalous hours and heat days")
    p.add_argument("--model", help="LSTM model file (required unless --baseline shahriar)")
    p.add_argument("--hourly", required=True, help="hourly CSV to scan")
    p.add_argument("--history", help="hourly CSV whose tail provides lookback history")
    p.add_argument(
        "--baseline",
        choices=["lstm", "shahriar"],
        default="lstm",
        help="detector backend (default lstm)",
    )
    p.add_argument("--anomalies", default="anomalies.csv", help="per-hour report path")
    p.add_argument("--verdicts", default="verdicts.csv", help="per-day verdict path")
    p.add_argument("--delta-threshold", type=float, help="shahriar δ cutoff (default 0.4)")
    p.add_argument("--min-anomaly-hours", type=int, help="day heat threshold (default: model's)")
    add_config(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("eval", help="score verdicts against the ground-truth calendar")
    p.add_argument("--verdicts", required=True, help="verdict CSV from detect")
    p.add_argument("--calendar", required=True, help="ground-truth calendar CSV")
    p.add_argument("--start-day", required=True, help="ISO date of day_index 0")
    p.add_argument("--cow", type=int, default=0, help="cow id to score (default 0)")
    p.add_argument("--hourly", help="hourly CSV for plot series")
    p.add_argument("--anomalies", help="anomaly CSV for plot series")
    p.add_argument("--sensors", nargs="*", help="sensor files for the classifier confusion matrix")
    p.add_argument("--pred-suffix", default=PRED_SUFFIX, help=f"predicted label suffix (default {PRED_SUFFIX})")
    p.add_argument("--truth-suffix", default=LABELS_SUFFIX, help=f"true label suffix (default {LABELS_SUFFIX})")
    p.add_argument("--out-dir", default=".", help="where metrics.csv and plot CSVs go (default .)")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "baseline", None) == "lstm" and args.command == "detect" and not args.model:
        print("error: detect requires --model unless --baseline shahriar", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, EmptyFile, InvalidSchedule) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SchemaMismatch, VersionMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (PipelineError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
