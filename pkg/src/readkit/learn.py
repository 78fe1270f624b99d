"""Dataset splitting, cross-validation, reference linear models, and the
evaluation metrics (classification rate, UAR, RMSE).

The estimators follow the scikit-learn fit/predict convention so they
compose with the wider ecosystem; the optimization itself is implemented
here (plain gradient descent / normal equations).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import EmptyInput, NonBinaryLabels, TooFewSamples
from .types import FeatureMatrix


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.folds < 2:
            raise ValueError("folds must be at least 2")


def matrix_to_arrays(matrix: FeatureMatrix,
                     columns: Optional[Sequence[int]] = None
                     ) -> tuple[np.ndarray, list[Optional[str]]]:
    cols = list(columns) if columns is not None else range(len(matrix.feature_names))
    X = np.array([[0.0 if row[j] is None else row[j] for j in cols]
                  for row in matrix.rows], dtype=float)
    return X, list(matrix.labels)


def _subset(matrix: FeatureMatrix, indices: Sequence[int]) -> FeatureMatrix:
    out = FeatureMatrix(feature_names=list(matrix.feature_names))
    for i in indices:
        out.add_row(matrix.sample_ids[i], list(matrix.rows[i]), matrix.labels[i])
    return out


def _stratified_pick(matrix: FeatureMatrix, n_train: int, rng: random.Random) -> list[int]:
    """Pick train indices preserving class proportions within one sample."""
    by_label: dict[Optional[str], list[int]] = {}
    for i, lb in enumerate(matrix.labels):
        by_label.setdefault(lb, []).append(i)
    total = matrix.n_rows
    quotas = {lb: n_train * len(idx) / total for lb, idx in by_label.items()}
    alloc = {lb: int(math.floor(q)) for lb, q in quotas.items()}
    leftover = n_train - sum(alloc.values())
    for lb in sorted(quotas, key=lambda lb: (-(quotas[lb] - alloc[lb]), str(lb))):
        if leftover <= 0:
            break
        alloc[lb] += 1
        leftover -= 1
    train: list[int] = []
    for lb in sorted(by_label, key=str):
        idx = list(by_label[lb])
        rng.shuffle(idx)
        train.extend(idx[:alloc[lb]])
    return sorted(train)


def split(matrix: FeatureMatrix, spec: SplitSpec) -> tuple[FeatureMatrix, FeatureMatrix]:
    """Deterministic stratified train/test split."""
    labels = {lb for lb in matrix.labels if lb is not None}
    if labels:
        counts = [matrix.labels.count(lb) for lb in labels]
        if min(counts) < 2:
            raise TooFewSamples("need at least two rows per class")
    elif matrix.n_rows < 2:
        raise TooFewSamples("need at least two rows")
    rng = random.Random(spec.seed)
    n_train = int(round(spec.train_fraction * matrix.n_rows))
    n_train = min(max(n_train, 1), matrix.n_rows - 1)
    train_idx = _stratified_pick(matrix, n_train, rng)
    test_idx = [i for i in range(matrix.n_rows) if i not in set(train_idx)]
    return _subset(matrix, train_idx), _subset(matrix, test_idx)


def fold_indices(matrix: FeatureMatrix, spec: SplitSpec) -> list[list[int]]:
    """Deterministic stratified partition into ``spec.folds`` folds."""
    if matrix.n_rows < spec.folds:
        raise TooFewSamples("fewer rows than folds")
    rng = random.Random(spec.seed)
    by_label: dict[Optional[str], list[int]] = {}
    for i, lb in enumerate(matrix.labels):
        by_label.setdefault(lb, []).append(i)
    folds: list[list[int]] = [[] for _ in range(spec.folds)]
    cursor = 0
    for lb in sorted(by_label, key=str):
        idx = list(by_label[lb])
        rng.shuffle(idx)
        for i in idx:
            folds[cursor % spec.folds].append(i)
            cursor += 1
    return [sorted(f) for f in folds]


def kfold(matrix: FeatureMatrix, spec: SplitSpec,
          trainer: Callable[[FeatureMatrix], "LinearModel"]) -> float:
    """Mean accuracy (classifier) or RMSE (regressor) over the folds."""
    folds = fold_indices(matrix, spec)
    scores = []
    for k, test_idx in enumerate(folds):
        if not test_idx:
            continue
        train_idx = [i for f, fold in enumerate(folds) if f != k for i in fold]
        model = trainer(_subset(matrix, train_idx))
        test = _subset(matrix, test_idx)
        X, truth = matrix_to_arrays(test)
        pred = model.predict(X)
        if model.kind == "classifier":
            scores.append(sum(p == t for p, t in zip(pred, truth)) / len(truth))
        else:
            values = [float(t) for t in truth]
            scores.append(regression_metrics(list(pred), values)["rmse"])
    return float(sum(scores) / len(scores))


class LinearModel(BaseEstimator):
    """Common surface of the reference linear models."""

    kind = "classifier"

    def save(self, path, feature_names: Sequence[str]) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"kind\t{self.kind}\n")
            for key, value in self._meta().items():
                fh.write(f"meta:{key}\t{value}\n")
            fh.write(f"bias\t{float(self.bias_)!r}\n")
            for name, w in zip(feature_names, self.weights_):
                fh.write(f"w\t{name}\t{float(w)!r}\n")

    def _meta(self) -> dict:
        return {}


def load_model(path) -> tuple["LinearModel", list[str]]:
    kind = None
    meta = {}
    bias = 0.0
    names, weights = [], []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            parts = raw.rstrip("\n").split("\t")
            if parts[0] == "kind":
                kind = parts[1]
            elif parts[0].startswith("meta:"):
                meta[parts[0][5:]] = parts[1]
            elif parts[0] == "bias":
                bias = float(parts[1])
            elif parts[0] == "w":
                names.append(parts[1])
                weights.append(float(parts[2]))
    if kind == "classifier":
        model = LogisticClassifier(c=float(meta.get("c", 1.0)),
                                   tolerance=float(meta.get("tolerance", 0.001)))
        model.classes_ = meta.get("classes", "").split(",")
    else:
        model = RidgeRegressor(penalty=float(meta.get("penalty", 1e-8)))
    model.weights_ = np.array(weights)
    model.bias_ = bias
    return model, names


class LogisticClassifier(LinearModel):
    """L2-regularized logistic model fit by gradient descent.

    Regularization strength is 1/c; iteration stops when the loss change
    drops below ``tolerance`` or after ``max_iters`` steps.
    """

    kind = "classifier"

    def __init__(self, c: float = 1.0, tolerance: float = 0.001,
                 max_iters: int = 2000, learning_rate: float = 0.5):
        self.c = c
        self.tolerance = tolerance
        self.max_iters = max_iters
        self.learning_rate = learning_rate

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        classes = sorted({str(lb) for lb in y})
        if len(classes) != 2:
            raise NonBinaryLabels(f"expected 2 classes, got {len(classes)}")
        self.classes_ = classes
        t = np.array([classes.index(str(lb)) for lb in y], dtype=float)
        n, d = X.shape
        w = np.zeros(d)
        b = 0.0
        lam = 1.0 / self.c
        lr = self.learning_rate

        def loss(w, b):
            z = X @ w + b
            # stable log(1 + exp(-z*s)) with s in {-1, +1}
            s = 2.0 * t - 1.0
            m = -z * s
            ll = np.logaddexp(0.0, m).mean()
            return ll + 0.5 * lam * float(w @ w) / n

        prev = loss(w, b)
        for _ in range(self.max_iters):
            z = X @ w + b
            p = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
            grad_w = X.T @ (p - t) / n + lam * w / n
            grad_b = float(np.mean(p - t))
            cur = prev
            while lr > 1e-9:
                w_new = w - lr * grad_w
                b_new = b - lr * grad_b
                cur = loss(w_new, b_new)
                if cur <= prev + 1e-15:
                    break
                lr /= 2.0
            if lr <= 1e-9:
                break
            w, b = w_new, b_new
            if abs(prev - cur) < self.tolerance:
                prev = cur
                break
            prev = cur
        self.weights_ = w
        self.bias_ = b
        return self

    def decision_function(self, X):
        return np.asarray(X, dtype=float) @ self.weights_ + self.bias_

    def predict(self, X):
        scores = self.decision_function(X)
        return [self.classes_[1] if s > 0 else self.classes_[0] for s in scores]

    def _meta(self) -> dict:
        return {"c": self.c, "tolerance": self.tolerance,
                "classes": ",".join(self.classes_)}


class RidgeRegressor(LinearModel):
    """Least squares with a small L2 penalty (bias unpenalized)."""

    kind = "regressor"

    def __init__(self, penalty: float = 1e-8):
        self.penalty = penalty

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray([float(v) for v in y])
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        Xc = X - x_mean
        yc = y - y_mean
        d = X.shape[1]
        gram = Xc.T @ Xc + self.penalty * np.eye(d)
        self.weights_ = np.linalg.solve(gram, Xc.T @ yc)
        self.bias_ = y_mean - float(x_mean @ self.weights_)
        return self

    def predict(self, X):
        return np.asarray(X, dtype=float) @ self.weights_ + self.bias_

    def _meta(self) -> dict:
        return {"penalty": self.penalty}


def round_scores(predictions: Sequence[float]) -> list[int]:
    """Round predicted scores to the nearest integer (half away from zero)."""
    return [int(math.floor(p + 0.5)) if p >= 0 else -int(math.floor(-p + 0.5))
            for p in predictions]


def train_classifier(train: FeatureMatrix, **kwargs) -> LogisticClassifier:
    X, y = matrix_to_arrays(train)
    if any(lb is None for lb in y):
        raise NonBinaryLabels("unlabeled rows in training data")
    return LogisticClassifier(**kwargs).fit(X, y)


def train_regressor(train: FeatureMatrix, **kwargs) -> RidgeRegressor:
    X, y = matrix_to_arrays(train)
    return RidgeRegressor(**kwargs).fit(X, [float(v) for v in y])


def classification_metrics(pred: Sequence[str], truth: Sequence[str]) -> dict[str, float]:
    """c_rate and UAR; classes absent from the truth are excluded from UAR."""
    if not pred or len(pred) != len(truth):
        raise EmptyInput("need equally long non-empty prediction/truth lists")
    c_rate = sum(p == t for p, t in zip(pred, truth)) / len(truth)
    recalls = []
    for cls in sorted(set(truth)):
        idx = [i for i, t in enumerate(truth) if t == cls]
        recalls.append(sum(pred[i] == cls for i in idx) / len(idx))
    return {"c_rate": c_rate, "uar": sum(recalls) / len(recalls)}


def regression_metrics(pred: Sequence[float], truth: Sequence[float]) -> dict[str, float]:
    if not pred or len(pred) != len(truth):
        raise EmptyInput("need equally long non-empty prediction/truth lists")
    mse = sum((p - t) ** 2 for p, t in zip(pred, truth)) / len(truth)
    return {"rmse": math.sqrt(mse)}


class ZScoreScaler(BaseEstimator, TransformerMixin):
    """Array front-end for the z-score convention used across the toolkit
    (population SD; constant columns map to zero)."""

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        self.mean_ = X.mean(axis=0)
        self.scale_ = X.std(axis=0)
        return self

    def transform(self, X):
        X = np.asarray(X, dtype=float)
        scale = np.where(self.scale_ > 0, self.scale_, 1.0)
        out = (X - self.mean_) / scale
        out[:, self.scale_ == 0] = 0.0
        return out
