"""Supervised effort classification on per-second feature frames.

Small, dependency-free learners sized for this data: a k-nearest-neighbour
voter with a choice of distance and a random forest of Gini-split trees.
Both are deterministic: kNN breaks distance ties by sample index and vote
ties by the nearest neighbour's class, then the lowest label; the forest
derives every tree's randomness from one seed and votes with a
lowest-label tie-break, so predictions do not depend on tree order.

Labels are small non-negative ints. The three-level difficulty labels are
1..3; binarize() folds them to 0 (low, level 1) and 1 (high, levels 2-3).
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import ConfigError, DataError, DegenerateInputError

METRICS = ("euclidean", "squared_euclidean", "manhattan", "chebyshev")


def distances(points: np.ndarray, x: np.ndarray, metric: str) -> np.ndarray:
    """Distance from each row of points to x."""
    diff = points - x
    if metric == "euclidean":
        return np.sqrt(np.sum(diff * diff, axis=1))
    if metric == "squared_euclidean":
        return np.sum(diff * diff, axis=1)
    if metric == "manhattan":
        return np.sum(np.abs(diff), axis=1)
    if metric == "chebyshev":
        return np.max(np.abs(diff), axis=1)
    raise ConfigError(f"unknown metric {metric!r}; choose one of {METRICS}")


@dataclass
class KnnModel:
    """Memorized training set plus the vote parameters."""

    points: np.ndarray
    labels: np.ndarray
    k: int = 1
    metric: str = "euclidean"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.points.ndim != 2 or len(self.points) != len(self.labels):
            raise DataError("knn: points must be 2-d with one label per row")
        if not 1 <= self.k <= len(self.points):
            raise ConfigError(f"knn: k must be in 1..{len(self.points)}, got {self.k}")
        if self.metric not in METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}; choose one of {METRICS}")

    def predict_one(self, x) -> int:
        return knn_predict(self, x)

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([knn_predict(self, x) for x in X], dtype=int)


def knn_predict(model: KnnModel, x) -> int:
    """Majority vote of the k nearest training points.

    Equal distances are ordered by training index. A tied vote goes to the
    single nearest neighbour's class when it is among the tied classes,
    otherwise to the lowest label.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != model.points.shape[1]:
        raise DataError(
            f"knn: probe has {x.shape[0]} features, model expects {model.points.shape[1]}"
        )
    d = distances(model.points, x, model.metric)
    order = np.argsort(d, kind="stable")[: model.k]
    votes = Counter(int(model.labels[i]) for i in order)
    top = max(votes.values())
    winners = sorted(label for label, n in votes.items() if n == top)
    if len(winners) == 1:
        return winners[0]
    nearest = int(model.labels[order[0]])
    return nearest if nearest in winners else winners[0]


# ---------------------------------------------------------------------------
# random forest


def _gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.sum(p * p))


def _majority(y: np.ndarray) -> int:
    votes = Counter(int(v) for v in y)
    top = max(votes.values())
    return min(label for label, n in votes.items() if n == top)


def _build_tree(X, y, classes, rng, n_feats, min_leaf, max_depth, depth):
    n = len(y)
    if n < 2 * min_leaf or (max_depth is not None and depth >= max_depth):
        return {"label": _majority(y)}
    class_idx = np.searchsorted(classes, y)
    total = np.bincount(class_idx, minlength=len(classes))
    parent_gini = _gini(total)
    if parent_gini == 0.0:
        return {"label": int(classes[class_idx[0]])}

    feats = np.sort(rng.choice(X.shape[1], size=n_feats, replace=False))
    best = None  # (impurity, feature, threshold)
    for j in feats:
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        left = np.zeros(len(classes), dtype=int)
        for i in range(n - 1):
            left[class_idx[order[i]]] += 1
            if xs[i + 1] <= xs[i]:
                continue
            n_left = i + 1
            n_right = n - n_left
            if n_left < min_leaf or n_right < min_leaf:
                continue
            impurity = (n_left * _gini(left) + n_right * _gini(total - left)) / n
            if best is None or impurity < best[0] - 1e-12:
                best = (impurity, int(j), float((xs[i] + xs[i + 1]) / 2.0))
    if best is None or best[0] >= parent_gini - 1e-12:
        return {"label": _majority(y)}

    _, feature, threshold = best
    mask = X[:, feature] <= threshold
    return {
        "feature": feature,
        "threshold": threshold,
        "left": _build_tree(X[mask], y[mask], classes, rng, n_feats, min_leaf, max_depth, depth + 1),
        "right": _build_tree(X[~mask], y[~mask], classes, rng, n_feats, min_leaf, max_depth, depth + 1),
    }


def _tree_predict(node, x) -> int:
    while "label" not in node:
        node = node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]
    return node["label"]


@dataclass
class ForestModel:
    trees: list
    n_features: int

    def predict_one(self, x) -> int:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.n_features:
            raise DataError(
                f"forest: probe has {x.shape[0]} features, model expects {self.n_features}"
            )
        votes = Counter(_tree_predict(tree, x) for tree in self.trees)
        top = max(votes.values())
        return min(label for label, n in votes.items() if n == top)

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([self.predict_one(x) for x in X], dtype=int)


def rf_train(
    X,
    y,
    n_trees: int = 23,
    seed: int = 0,
    max_depth: Optional[int] = None,
    min_leaf: int = 1,
) -> ForestModel:
    """Bootstrap-aggregated Gini trees with sqrt(d) feature subsampling.

    All randomness (bootstraps, per-node feature draws) is derived from the
    seed, one child stream per tree, so retraining reproduces the forest
    exactly.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or len(X) != len(y):
        raise DataError("rf: X must be 2-d with one label per row")
    if n_trees < 1:
        raise ConfigError(f"rf: need at least 1 tree, got {n_trees}")
    classes = np.unique(y)
    if len(classes) < 2:
        raise DegenerateInputError("rf: training data has a single class")
    n, d = X.shape
    n_feats = max(1, int(round(np.sqrt(d))))
    streams = np.random.SeedSequence(seed).spawn(n_trees)
    trees = []
    for stream in streams:
        rng = np.random.default_rng(stream)
        idx = rng.integers(0, n, size=n)
        trees.append(
            _build_tree(X[idx], y[idx], classes, rng, n_feats, min_leaf, max_depth, 0)
        )
    return ForestModel(trees=trees, n_features=d)


# ---------------------------------------------------------------------------
# labels and datasets


def binarize(labels):
    """Fold 3-level labels onto 2: level 1 -> 0 (low), levels 2,3 -> 1 (high)."""
    arr = np.asarray(labels, dtype=int)
    if not np.all(np.isin(arr, (1, 2, 3))):
        raise DataError("binarize: labels must be in {1, 2, 3}")
    out = (arr >= 2).astype(int)
    return int(out) if np.isscalar(labels) or arr.ndim == 0 else out


@dataclass(frozen=True)
class LabelledFrame:
    """One training row: feature vector plus effort label, keyed by subject."""

    subject: str
    features: tuple
    label: int


def read_dataset_csv(path: str | Path) -> list[LabelledFrame]:
    """Dataset CSV with header subject,t_s,hrv,pupil_z,td."""
    frames = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"subject", "t_s", "hrv", "pupil_z", "td"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise DataError(f"dataset {path}: expected columns {sorted(need)}")
        for row in reader:
            try:
                frames.append(
                    LabelledFrame(
                        subject=row["subject"],
                        features=(float(row["hrv"]), float(row["pupil_z"])),
                        label=int(row["td"]),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise DataError(f"dataset {path}: bad row {row!r}") from exc
    if not frames:
        raise DataError(f"dataset {path}: empty")
    return frames


# ---------------------------------------------------------------------------
# cross-validation

SCHEMES = ("per-subject-75-25", "leave-subjects-out")

ModelSpec = Union[Mapping, Callable]


@dataclass(frozen=True)
class CvReport:
    global_accuracy: float
    per_class: dict
    split: str
    n_train: int
    n_test: int


def fit_model(spec: ModelSpec, X, y):
    """Build a fitted predictor from a spec dict or a factory callable."""
    if callable(spec):
        return spec(X, y)
    kind = spec.get("kind")
    if kind == "knn":
        return KnnModel(X, y, k=int(spec.get("k", 1)), metric=spec.get("metric", "euclidean"))
    if kind == "rf":
        return rf_train(
            X,
            y,
            n_trees=int(spec.get("trees", 23)),
            seed=int(spec.get("seed", 0)),
            max_depth=spec.get("max_depth"),
            min_leaf=int(spec.get("min_leaf", 1)),
        )
    raise ConfigError(f"model spec: unknown kind {kind!r}")


def _accuracy_report(y_true, y_pred, split, n_train) -> CvReport:
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    per_class = {}
    for label in np.unique(y_true):
        mask = y_true == label
        per_class[int(label)] = float(np.mean(y_pred[mask] == label))
    return CvReport(
        global_accuracy=float(np.mean(y_pred == y_true)),
        per_class=per_class,
        split=split,
        n_train=n_train,
        n_test=len(y_true),
    )


def cross_validate(
    frames: Sequence[LabelledFrame],
    scheme: str,
    model_spec: ModelSpec,
    seed: int = 0,
    test_subjects: Optional[Sequence[str]] = None,
) -> CvReport:
    """Pooled held-out accuracy under one of two splits.

    "per-subject-75-25" trains one model per subject on a random 75% of
    that subject's frames and scores the other 25%; predictions are pooled
    over subjects. "leave-subjects-out" holds out whole subjects (given
    explicitly, or a seeded random quarter of them) and trains a single
    model on the rest.
    """
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}; choose one of {SCHEMES}")
    if not frames:
        raise DataError("cross_validate: no frames")
    by_subject: dict[str, list[LabelledFrame]] = {}
    for f in frames:
        by_subject.setdefault(f.subject, []).append(f)
    rng = np.random.default_rng(seed)

    def xy(rows):
        return (
            np.array([r.features for r in rows], dtype=float),
            np.array([r.label for r in rows], dtype=int),
        )

    if scheme == "per-subject-75-25":
        y_true, y_pred, n_train = [], [], 0
        for subject in sorted(by_subject):
            rows = by_subject[subject]
            n = len(rows)
            n_test = max(1, round(0.25 * n))
            if n - n_test < 1:
                raise DataError(
                    f"cross_validate: subject {subject!r} has too few frames ({n}) to split"
                )
            order = rng.permutation(n)
            test_idx = set(order[:n_test].tolist())
            train = [rows[i] for i in range(n) if i not in test_idx]
            test = [rows[i] for i in range(n) if i in test_idx]
            X_tr, y_tr = xy(train)
            X_te, y_te = xy(test)
            model = fit_model(model_spec, X_tr, y_tr)
            y_true.extend(y_te.tolist())
            y_pred.extend(model.predict(X_te).tolist())
            n_train += len(train)
        split = f"per-subject 75/25, {len(by_subject)} subject(s), seed={seed}"
        return _accuracy_report(y_true, y_pred, split, n_train)

    # leave-subjects-out
    subjects = sorted(by_subject)
    if test_subjects is None:
        n_held = max(1, round(0.25 * len(subjects)))
        if n_held >= len(subjects):
            raise DataError("cross_validate: not enough subjects to hold any out")
        held = sorted(rng.choice(subjects, size=n_held, replace=False).tolist())
    else:
        held = sorted(set(test_subjects))
        unknown = set(held) - set(subjects)
        if unknown:
            raise DataError(f"cross_validate: unknown test subjects {sorted(unknown)}")
        if not held or len(held) >= len(subjects):
            raise DataError("cross_validate: held-out set must be a proper non-empty subset")
    train = [f for s in subjects if s not in held for f in by_subject[s]]
    test = [f for s in held for f in by_subject[s]]
    X_tr, y_tr = xy(train)
    X_te, y_te = xy(test)
    model = fit_model(model_spec, X_tr, y_tr)
    split = f"leave-subjects-out, held out {held}, seed={seed}"
    return _accuracy_report(y_te, model.predict(X_te), split, len(train))


# ---------------------------------------------------------------------------
# persistence


def model_to_dict(model) -> dict:
    if isinstance(model, KnnModel):
        return {
            "kind": "knn",
            "k": model.k,
            "metric": model.metric,
            "points": model.points.tolist(),
            "labels": model.labels.tolist(),
        }
    if isinstance(model, ForestModel):
        return {"kind": "rf", "n_features": model.n_features, "trees": model.trees}
    raise ConfigError(f"cannot serialize model of type {type(model).__name__}")


def model_from_dict(raw: Mapping):
    try:
        if raw["kind"] == "knn":
            return KnnModel(
                points=np.asarray(raw["points"], dtype=float),
                labels=np.asarray(raw["labels"], dtype=int),
                k=int(raw["k"]),
                metric=raw["metric"],
            )
        if raw["kind"] == "rf":
            return ForestModel(trees=list(raw["trees"]), n_features=int(raw["n_features"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"model file: {exc}") from exc
    raise ConfigError(f"model file: unknown kind {raw.get('kind')!r}")


def save_model(model, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path: str | Path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"model file {path}: {exc}") from exc
    return model_from_dict(raw)
