"""From-scratch random forest over window feature datasets.

CART trees on bootstrap resamples; each split draws floor(sqrt(d))
candidate features without replacement and scans midpoints between
consecutive distinct sorted values. Split quality is compared through
S = Σ_c counts_c²/n summed over both children (equivalent to minimizing
weighted Gini, but exact in float64 for integer counts, so an independent
brute-force oracle can match it bit for bit). Ties prefer the lowest
feature index, then the lowest threshold, which keeps tree structure
invariant under strictly increasing per-feature transforms.

Trees are compiled to flat arrays for vectorized batch prediction; models
persist as versioned JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CorruptModel, EmptyDataset, SchemaMismatch, VersionMismatch
from .features import FeatureDataset, WindowFeatures
from .ingest import BEHAVIORS, Behavior, N_BEHAVIORS

MODEL_VERSION = 1
CLASS_TOKENS = tuple(b.token for b in BEHAVIORS)


@dataclass(frozen=True)
class ForestConfig:
    """Forest hyperparameters; features_per_split=None means floor(sqrt(d))."""

    n_trees: int = 100
    max_depth: int = 16
    min_samples_leaf: int = 5
    features_per_split: int | None = None
    bootstrap: bool = True
    class_weight: str | None = None

    def __post_init__(self):
        if self.n_trees < 1 or self.max_depth < 0 or self.min_samples_leaf < 1:
            raise ValueError("invalid forest hyperparameters")
        if self.class_weight not in (None, "balanced"):
            raise ValueError("class_weight must be None or 'balanced'")


@dataclass(frozen=True)
class Leaf:
    """Terminal node: raw class counts of the training rows that landed here."""

    counts: np.ndarray

    def __post_init__(self):
        if self.counts.sum() <= 0:
            raise ValueError("leaf must hold at least one sample")


@dataclass(frozen=True)
class Split:
    """Internal node: rows with feature <= threshold go left."""

    feature: int
    threshold: float
    left: "Split | Leaf"
    right: "Split | Leaf"


class _TreeArrays:
    """Flat preorder arrays of one tree for vectorized prediction."""

    __slots__ = ("feature", "threshold", "left", "right", "probs")

    def __init__(self, root: Split | Leaf):
        feature: list[int] = []
        threshold: list[float] = []
        left: list[int] = []
        right: list[int] = []
        probs: list[np.ndarray] = []

        def emit(node: Split | Leaf) -> int:
            i = len(feature)
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            if isinstance(node, Leaf):
                probs.append(node.counts / node.counts.sum())
            else:
                probs.append(np.zeros(N_BEHAVIORS))
                feature[i] = node.feature
                threshold[i] = node.threshold
                left[i] = emit(node.left)
                right[i] = emit(node.right)
            return i

        emit(root)
        self.feature = np.array(feature, dtype=np.int64)
        self.threshold = np.array(threshold, dtype=np.float64)
        self.left = np.array(left, dtype=np.int64)
        self.right = np.array(right, dtype=np.int64)
        self.probs = np.array(probs, dtype=np.float64)

    def leaf_probs(self, x: np.ndarray) -> np.ndarray:
        node = np.zeros(len(x), dtype=np.int64)
        pending = self.feature[node] >= 0
        while pending.any():
            rows = np.nonzero(pending)[0]
            at = node[rows]
            go_left = x[rows, self.feature[at]] <= self.threshold[at]
            node[rows] = np.where(go_left, self.left[at], self.right[at])
            pending = self.feature[node] >= 0
        return self.probs[node]


class RandomForestModel:
    """Trained forest: node trees, schema, importances, compiled arrays."""

    def __init__(self, trees, config: ForestConfig, schema, importances, seed: int,
                 extras: dict | None = None):
        self.trees = list(trees)
        self.config = config
        self.schema = tuple(schema)
        self.importances = np.asarray(importances, dtype=np.float64)
        self.seed = int(seed)
        self.extras = dict(extras or {})
        if len(self.importances) != len(self.schema):
            raise ValueError("importances length must equal schema length")
        self._compiled = [_TreeArrays(t) for t in self.trees]


@dataclass(frozen=True)
class Prediction:
    behavior: Behavior
    probabilities: np.ndarray


@dataclass(frozen=True)
class EvalReport:
    """Confusion matrix (rows = truth, cols = predicted) and derived rates."""

    confusion: np.ndarray
    accuracy: float
    precision: np.ndarray
    recall: np.ndarray

    @property
    def macro_f1(self) -> float:
        p, r = self.precision, self.recall
        denom = p + r
        f1 = np.where(denom > 0, 2 * p * r / np.where(denom > 0, denom, 1.0), 0.0)
        return float(f1.mean())


def _node_score(weighted_counts: np.ndarray) -> float:
    n = weighted_counts.sum()
    return float((weighted_counts**2).sum() / n) if n > 0 else 0.0


def _best_split(x, y, rows, feats, weights, min_leaf):
    """Best (feature, threshold, gain) over candidate features, or None.

    Gain is S(children) − S(parent) with S = Σc²/n; only strictly positive
    gains are returned. Scanning features in ascending order with a strict
    improvement test breaks score ties toward the lowest feature; within a
    feature, the first best boundary has the lowest threshold.
    """
    m = len(rows)
    yv = y[rows]
    onehot = np.zeros((m, N_BEHAVIORS), dtype=np.float64)
    onehot[np.arange(m), yv] = 1.0
    onehot *= weights
    totals = onehot.sum(axis=0)
    s_parent = _node_score(totals)
    best_s = s_parent
    best = None
    for f in feats:
        v = x[rows, f]
        order = np.argsort(v, kind="stable")
        sv = v[order]
        prefix = np.cumsum(onehot[order], axis=0)
        bounds = np.nonzero(sv[:-1] != sv[1:])[0]
        if len(bounds) == 0:
            continue
        n_left_rows = bounds + 1
        keep = (n_left_rows >= min_leaf) & (m - n_left_rows >= min_leaf)
        bounds = bounds[keep]
        if len(bounds) == 0:
            continue
        left_counts = prefix[bounds]
        right_counts = totals - left_counts
        n_left = left_counts.sum(axis=1)
        n_right = right_counts.sum(axis=1)
        scores = (left_counts**2).sum(axis=1) / n_left
        scores += (right_counts**2).sum(axis=1) / n_right
        j = int(np.argmax(scores))
        if scores[j] > best_s:
            best_s = float(scores[j])
            lo, hi = sv[bounds[j]], sv[bounds[j] + 1]
            mid = (lo + hi) / 2.0
            # adjacent floats can round the midpoint onto the right value,
            # which would send the whole boundary row-set rightward
            threshold = float(lo) if mid >= hi else float(mid)
            best = (int(f), threshold, best_s - s_parent)
    return best


def _build_tree(x, y, rows, depth, rng, cfg, k_feats, weights, importances):
    counts = np.bincount(y[rows], minlength=N_BEHAVIORS).astype(np.int64)
    if (
        depth >= cfg.max_depth
        or len(rows) < 2 * cfg.min_samples_leaf
        or (counts > 0).sum() <= 1
    ):
        return Leaf(counts)
    feats = np.sort(rng.choice(x.shape[1], size=k_feats, replace=False))
    found = _best_split(x, y, rows, feats, weights, cfg.min_samples_leaf)
    if found is None:
        return Leaf(counts)
    feature, threshold, gain = found
    go_left = x[rows, feature] <= threshold
    left = _build_tree(x, y, rows[go_left], depth + 1, rng, cfg, k_feats, weights, importances)
    right = _build_tree(x, y, rows[~go_left], depth + 1, rng, cfg, k_feats, weights, importances)
    importances[feature] += gain
    return Split(feature, threshold, left, right)


def _class_weights(y_tree: np.ndarray, cfg: ForestConfig) -> np.ndarray:
    if cfg.class_weight is None:
        return np.ones(N_BEHAVIORS)
    counts = np.bincount(y_tree, minlength=N_BEHAVIORS)
    return np.where(counts > 0, len(y_tree) / (N_BEHAVIORS * np.maximum(counts, 1)), 0.0)


def train_forest(
    dataset: FeatureDataset,
    hyperparams: ForestConfig | None = None,
    seed: int = 0,
    extras: dict | None = None,
) -> RandomForestModel:
    """Fit the forest; deterministic given (dataset, hyperparams, seed).

    Tree t draws its own RNG stream from (seed, t), so parallel and serial
    training would produce the same model.
    """
    if len(dataset) == 0:
        raise EmptyDataset("cannot train on an empty dataset")
    cfg = hyperparams or ForestConfig()
    x = np.ascontiguousarray(dataset.values)
    y = dataset.labels.astype(np.int64)
    n, d = x.shape
    k_feats = cfg.features_per_split or max(1, math.floor(math.sqrt(d)))
    if not (1 <= k_feats <= d):
        raise ValueError(f"features_per_split must be in [1, {d}]")
    importances = np.zeros(d, dtype=np.float64)
    trees = []
    for t in range(cfg.n_trees):
        rng = np.random.default_rng(np.random.SeedSequence([seed, t]))
        rows = rng.integers(0, n, size=n) if cfg.bootstrap else np.arange(n)
        weights = _class_weights(y[rows], cfg)
        trees.append(_build_tree(x, y, rows, 0, rng, cfg, k_feats, weights, importances))
    resolved = replace(cfg, features_per_split=k_feats)
    return RandomForestModel(trees, resolved, dataset.schema, importances, seed, extras)


def predict_batch(model: RandomForestModel, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(predicted codes, class probabilities) for a feature matrix."""
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != len(model.schema):
        raise SchemaMismatch(f"expected {len(model.schema)} features, got {x.shape}")
    probs = np.zeros((len(x), N_BEHAVIORS))
    for arrays in model._compiled:
        probs += arrays.leaf_probs(x)
    probs /= len(model._compiled)
    # argmax takes the first maximum: the documented F < R < L < O tie order
    return probs.argmax(axis=1).astype(np.uint8), probs


def predict(model: RandomForestModel, features: WindowFeatures) -> Prediction:
    """Mean of leaf class frequencies across trees; argmax with tie order."""
    if features.schema != model.schema:
        raise SchemaMismatch("feature schema does not match model schema")
    codes, probs = predict_batch(model, features.values[None, :])
    return Prediction(BEHAVIORS[int(codes[0])], probs[0])


def evaluate(model: RandomForestModel, dataset: FeatureDataset) -> EvalReport:
    if dataset.schema != model.schema:
        raise SchemaMismatch("dataset schema does not match model schema")
    if len(dataset) == 0:
        raise EmptyDataset("cannot evaluate on an empty dataset")
    codes, _ = predict_batch(model, dataset.values)
    confusion = np.zeros((N_BEHAVIORS, N_BEHAVIORS), dtype=np.int64)
    np.add.at(confusion, (dataset.labels.astype(np.int64), codes.astype(np.int64)), 1)
    total = confusion.sum()
    accuracy = float(np.trace(confusion) / total)
    col = confusion.sum(axis=0)
    row = confusion.sum(axis=1)
    diag = np.diag(confusion)
    precision = np.where(col > 0, diag / np.maximum(col, 1), 0.0)
    recall = np.where(row > 0, diag / np.maximum(row, 1), 0.0)
    return EvalReport(confusion, accuracy, precision, recall)


def feature_importance(model: RandomForestModel) -> list[tuple[str, float]]:
    """Per-feature impurity decrease, normalized to sum 1, descending."""
    total = model.importances.sum()
    if total == 0:
        return []
    share = model.importances / total
    order = np.argsort(-share, kind="stable")
    return [(model.schema[i], float(share[i])) for i in order]


def chronological_split(dataset: FeatureDataset, train_frac: float = 0.7):
    """Earliest train_frac of rows for training, the rest for evaluation."""
    if not (0.0 < train_frac < 1.0):
        raise ValueError("train_frac must be in (0, 1)")
    cut = int(len(dataset) * train_frac)
    head = FeatureDataset(
        dataset.values[:cut], dataset.labels[:cut], dataset.schema, dataset.param_mode
    )
    tail = FeatureDataset(
        dataset.values[cut:], dataset.labels[cut:], dataset.schema, dataset.param_mode
    )
    return head, tail


def majority_baseline_accuracy(train: FeatureDataset, test: FeatureDataset) -> float:
    """Accuracy of always predicting the training majority class."""
    majority = int(np.bincount(train.labels, minlength=N_BEHAVIORS).argmax())
    return float((test.labels == majority).mean())


# ---------------------------------------------------------------------------
# Persistence


def _node_to_json(node: Split | Leaf):
    if isinstance(node, Leaf):
        return {"counts": [int(c) for c in node.counts]}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_json(node.left),
        "right": _node_to_json(node.right),
    }


def _node_from_json(obj, n_features: int):
    if not isinstance(obj, dict):
        raise CorruptModel("tree node must be an object")
    if "counts" in obj:
        counts = np.asarray(obj["counts"], dtype=np.int64)
        if counts.shape != (N_BEHAVIORS,) or counts.sum() <= 0:
            raise CorruptModel("bad leaf counts")
        return Leaf(counts)
    try:
        feature = int(obj["feature"])
        threshold = float(obj["threshold"])
        if not (0 <= feature < n_features):
            raise CorruptModel(f"split feature {feature} out of range")
        return Split(
            feature,
            threshold,
            _node_from_json(obj["left"], n_features),
            _node_from_json(obj["right"], n_features),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"bad split node: {exc}") from None


def save_model(model: RandomForestModel, path) -> None:
    cfg = model.config
    payload = {
        "version": MODEL_VERSION,
        "hyperparams": {
            "n_trees": cfg.n_trees,
            "max_depth": cfg.max_depth,
            "min_samples_leaf": cfg.min_samples_leaf,
            "features_per_split": cfg.features_per_split,
            "bootstrap": cfg.bootstrap,
            "class_weight": cfg.class_weight,
            "seed": model.seed,
        },
        "schema": list(model.schema),
        "classes": list(CLASS_TOKENS),
        "importances": [float(v) for v in model.importances],
        "trees": [_node_to_json(t) for t in model.trees],
        "extras": model.extras,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_model(path) -> RandomForestModel:
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
        if tuple(payload["classes"]) != CLASS_TOKENS:
            raise CorruptModel(f"{path}: unexpected class list")
        schema = tuple(str(s) for s in payload["schema"])
        hp = payload["hyperparams"]
        cfg = ForestConfig(
            n_trees=int(hp["n_trees"]),
            max_depth=int(hp["max_depth"]),
            min_samples_leaf=int(hp["min_samples_leaf"]),
            features_per_split=int(hp["features_per_split"]),
            bootstrap=bool(hp["bootstrap"]),
            class_weight=hp["class_weight"],
        )
        trees = [_node_from_json(t, len(schema)) for t in payload["trees"]]
        importances = np.asarray(payload["importances"], dtype=np.float64)
        if len(trees) != cfg.n_trees:
            raise CorruptModel(f"{path}: tree count disagrees with hyperparams")
        return RandomForestModel(
            trees, cfg, schema, importances, int(hp["seed"]), payload.get("extras", {})
        )
    except CorruptModel:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"{path}: {exc}") from None
