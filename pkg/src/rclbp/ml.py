"""Splitting, KNN and Gaussian naive Bayes classifiers, metrics and cross-validation.

All tie-breaking is by index: distance ties prefer the lower training index,
vote and likelihood ties prefer the class listed first in ``class_names``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class LabeledDataset:
    features: np.ndarray  # (n, D)
    labels: list[str]
    class_names: list[str]

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim == 1 and self.features.size == 0:
            self.features = self.features.reshape(0, 1)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D array")
        self.labels = list(self.labels)
        self.class_names = list(self.class_names)
        if len(self.labels) != self.features.shape[0]:
            raise ValueError(f"{self.features.shape[0]} feature rows but {len(self.labels)} labels")
        if len(set(self.class_names)) != len(self.class_names):
            raise ValueError("duplicate class names")
        unknown = set(self.labels) - set(self.class_names)
        if unknown:
            raise ValueError(f"labels not in class_names: {sorted(unknown)}")

    def __len__(self):
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def label_indices(self) -> np.ndarray:
        pos = {c: i for i, c in enumerate(self.class_names)}
        return np.array([pos[l] for l in self.labels], dtype=np.int64)

    def subset(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=np.int64)
        return LabeledDataset(self.features[idx], [self.labels[i] for i in idx], self.class_names)


@dataclass(frozen=True)
class KnnConfig:
    k: int = 9
    p: float = 1.0
    weighting: str = "distance"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.weighting not in ("uniform", "distance"):
            raise ValueError(f"unknown weighting {self.weighting!r}")


@dataclass(frozen=True)
class GnbConfig:
    var_smoothing: float = 3.51e-08


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _class_members(ds: LabeledDataset) -> list[np.ndarray]:
    y = ds.label_indices()
    return [np.flatnonzero(y == c) for c in range(len(ds.class_names))]


def stratified_split(ds: LabeledDataset, train_fraction: float = 0.8, seed: int = 0, stratify: bool = True):
    """Seeded train/test split. Returns ``(train, test)``.

    Per class, ``round(train_fraction * n)`` samples (clamped to ``1..n-1``)
    go to training. Both outputs keep the original sample order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    rng = np.random.Generator(np.random.PCG64(seed))
    if stratify:
        groups = _class_members(ds)
        for name, g in zip(ds.class_names, groups):
            if 0 < g.size < 2:
                raise ValueError(f"class {name!r} has fewer than 2 samples")
    else:
        if len(ds) < 2:
            raise ValueError("dataset has fewer than 2 samples")
        groups = [np.arange(len(ds))]
    train_idx = []
    for g in groups:
        if g.size == 0:
            continue
        perm = g[rng.permutation(g.size)]
        n_train = min(max(_round_half_up(train_fraction * g.size), 1), g.size - 1)
        train_idx.append(perm[:n_train])
    train_idx = np.sort(np.concatenate(train_idx))
    test_mask = np.ones(len(ds), dtype=bool)
    test_mask[train_idx] = False
    return ds.subset(train_idx), ds.subset(np.flatnonzero(test_mask))


# --------------------------------------------------------------------------
# KNN
# --------------------------------------------------------------------------


def minkowski_distances(X: np.ndarray, q: np.ndarray, p: float) -> np.ndarray:
    diff = np.abs(X - q)
    if p == 1:
        return diff.sum(axis=1)
    if p == 2:
        return np.sqrt((diff * diff).sum(axis=1))
    return (diff**p).sum(axis=1) ** (1.0 / p)


def knn_predict(train: LabeledDataset, query, cfg: KnnConfig | None = None) -> str:
    """Label of ``query`` by (distance-weighted) vote among the ``k`` nearest training rows.

    With distance weighting, exact matches (distance 0) take the vote alone,
    with equal weights.
    """
    cfg = cfg or KnnConfig()
    q = np.asarray(query, dtype=np.float64)
    if len(train) == 0:
        raise ValueError("empty training set")
    if q.shape != (train.dim,):
        raise ValueError(f"query dimension {q.shape} does not match training dimension {train.dim}")
    if cfg.k > len(train):
        raise ValueError(f"k={cfg.k} exceeds training size {len(train)}")
    dist = minkowski_distances(train.features, q, cfg.p)
    nearest = np.argsort(dist, kind="stable")[: cfg.k]
    y = train.label_indices()[nearest]
    d = dist[nearest]
    if cfg.weighting == "uniform":
        w = np.ones_like(d)
    elif np.any(d == 0):
        w = (d == 0).astype(np.float64)
    else:
        w = 1.0 / d
    votes = np.zeros(len(train.class_names))
    np.add.at(votes, y, w)
    return train.class_names[int(np.argmax(votes))]


# --------------------------------------------------------------------------
# Gaussian naive Bayes
# --------------------------------------------------------------------------


@dataclass
class GnbModel:
    class_names: list[str]
    priors: np.ndarray  # (m,)
    means: np.ndarray  # (m, D)
    variances: np.ndarray  # (m, D)
    var_smoothing: float
    epsilon: float = field(default=0.0)

    def joint_log_likelihood(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.means.shape[1]:
            raise ValueError(f"query dimension {X.shape[1]} does not match model dimension {self.means.shape[1]}")
        log_norm = -0.5 * np.sum(np.log(2.0 * np.pi * self.variances), axis=1)
        out = np.empty((X.shape[0], len(self.class_names)))
        with np.errstate(divide="ignore"):
            log_prior = np.log(self.priors)
        for c in range(len(self.class_names)):
            z = (X - self.means[c]) ** 2 / self.variances[c]
            out[:, c] = log_prior[c] + log_norm[c] - 0.5 * z.sum(axis=1)
        return out


def gnb_fit(train: LabeledDataset, var_smoothing: float = 3.51e-08) -> GnbModel:
    """Per-class means and (population) variances, floored by ``var_smoothing * max pooled variance``."""
    X = train.features
    groups = _class_members(train)
    for name, g in zip(train.class_names, groups):
        if g.size == 0:
            raise ValueError(f"class {name!r} has no training samples")
    pooled = float(np.max(np.var(X, axis=0))) if X.size else 0.0
    # degenerate data (every feature constant) still needs a positive floor
    epsilon = var_smoothing * pooled if pooled > 0 else var_smoothing
    means = np.stack([X[g].mean(axis=0) for g in groups])
    variances = np.stack([X[g].var(axis=0) for g in groups]) + epsilon
    priors = np.array([g.size for g in groups], dtype=np.float64) / len(train)
    return GnbModel(list(train.class_names), priors, means, variances, var_smoothing, epsilon)


def gnb_predict(model: GnbModel, query) -> str:
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (model.means.shape[1],):
        raise ValueError(f"query dimension {q.shape} does not match model dimension {model.means.shape[1]}")
    jll = model.joint_log_likelihood(q[None, :])[0]
    return model.class_names[int(np.argmax(jll))]


def fit_predict(train: LabeledDataset, queries, classifier) -> list[str]:
    """Predict every row of ``queries`` with a ``KnnConfig`` or ``GnbConfig``."""
    Q = np.asarray(queries, dtype=np.float64)
    if Q.size == 0:
        return []
    if isinstance(classifier, KnnConfig):
        return [knn_predict(train, q, classifier) for q in Q]
    if isinstance(classifier, GnbConfig):
        model = gnb_fit(train, classifier.var_smoothing)
        jll = model.joint_log_likelihood(Q)
        return [model.class_names[i] for i in np.argmax(jll, axis=1)]
    raise TypeError(f"unsupported classifier config {classifier!r}")


# --------------------------------------------------------------------------
# Metrics
# --------------------------------------------------------------------------


@dataclass
class MetricsReport:
    class_names: list[str]
    confusion: np.ndarray  # rows = true class, cols = predicted
    weighted_precision: float | None = None
    weighted_recall: float | None = None
    weighted_f1: float | None = None

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    @property
    def tp(self) -> np.ndarray:
        return np.diag(self.confusion).copy()

    @property
    def fp(self) -> np.ndarray:
        return self.confusion.sum(axis=0) - self.tp

    @property
    def fn(self) -> np.ndarray:
        return self.confusion.sum(axis=1) - self.tp

    @property
    def tn(self) -> np.ndarray:
        return self.confusion.sum() - self.tp - self.fp - self.fn

    @property
    def support(self) -> np.ndarray:
        return self.confusion.sum(axis=1)

    def to_dict(self) -> dict:
        return {
            "class_names": self.class_names,
            "confusion": self.confusion.tolist(),
            "per_class": {
                name: {
                    "tp": int(self.tp[i]),
                    "fp": int(self.fp[i]),
                    "fn": int(self.fn[i]),
                    "tn": int(self.tn[i]),
                    "support": int(self.support[i]),
                }
                for i, name in enumerate(self.class_names)
            },
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "weighted_f1": self.weighted_f1,
        }

    def confusion_csv(self) -> str:
        lines = ["true\\pred," + ",".join(self.class_names)]
        for name, row in zip(self.class_names, self.confusion):
            lines.append(name + "," + ",".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"


def confusion_matrix(true_labels, predicted_labels, class_names) -> MetricsReport:
    true_labels = list(true_labels)
    predicted_labels = list(predicted_labels)
    if len(true_labels) != len(predicted_labels):
        raise ValueError(f"{len(true_labels)} true labels but {len(predicted_labels)} predictions")
    pos = {c: i for i, c in enumerate(class_names)}
    cm = np.zeros((len(class_names), len(class_names)), dtype=np.int64)
    for t, p in zip(true_labels, predicted_labels):
        if t not in pos:
            raise ValueError(f"label {t!r} not in class_names")
        if p not in pos:
            raise ValueError(f"label {p!r} not in class_names")
        cm[pos[t], pos[p]] += 1
    return MetricsReport(list(class_names), cm)


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros(num.shape, dtype=np.float64)
    nz = den > 0
    out[nz] = num[nz] / den[nz]
    return out


def weighted_metrics(report: MetricsReport) -> MetricsReport:
    """Support-weighted precision, recall and F1; zero-support classes carry no weight."""
    support = report.support.astype(np.float64)
    total = math.fsum(support)
    if total == 0:
        raise ValueError("all class supports are zero")
    tp, fp, fn = report.tp, report.fp, report.fn
    precision = _safe_ratio(tp, tp + fp)
    recall = _safe_ratio(tp, tp + fn)
    f1 = _safe_ratio(2 * tp, 2 * tp + fp + fn)

    def wavg(values):
        # correctly rounded sum: independent of class order
        return math.fsum(float(s) * float(v) for s, v in zip(support, values)) / float(total)

    return MetricsReport(
        report.class_names,
        report.confusion.copy(),
        weighted_precision=wavg(precision),
        weighted_recall=wavg(recall),
        weighted_f1=wavg(f1),
    )


def evaluate(true_labels, predicted_labels, class_names) -> MetricsReport:
    return weighted_metrics(confusion_matrix(true_labels, predicted_labels, class_names))


# --------------------------------------------------------------------------
# Cross-validation
# --------------------------------------------------------------------------


@dataclass
class CvResult:
    folds: list[MetricsReport]
    mean_precision: float
    mean_recall: float
    mean_f1: float

    def to_dict(self) -> dict:
        return {
            "mean_precision": self.mean_precision,
            "mean_recall": self.mean_recall,
            "mean_f1": self.mean_f1,
            "folds": [f.to_dict() for f in self.folds],
        }


def stratified_folds(ds: LabeledDataset, k_folds: int, seed: int = 0) -> list[np.ndarray]:
    """Validation index sets; per class, fold sizes differ by at most one."""
    if k_folds < 2:
        raise ValueError("k_folds must be >= 2")
    rng = np.random.Generator(np.random.PCG64(seed))
    folds = [[] for _ in range(k_folds)]
    for name, g in zip(ds.class_names, _class_members(ds)):
        if g.size == 0:
            continue
        if g.size < k_folds:
            raise ValueError(f"class {name!r} has {g.size} samples, fewer than k_folds={k_folds}")
        perm = g[rng.permutation(g.size)]
        for j, idx in enumerate(perm):
            folds[j % k_folds].append(idx)
    return [np.sort(np.array(f, dtype=np.int64)) for f in folds]


def kfold_cv(ds: LabeledDataset, k_folds: int = 10, classifier=None, seed: int = 0) -> CvResult:
    classifier = classifier or KnnConfig()
    reports = []
    all_idx = np.arange(len(ds))
    for val in stratified_folds(ds, k_folds, seed):
        train = ds.subset(np.setdiff1d(all_idx, val))
        held = ds.subset(val)
        pred = fit_predict(train, held.features, classifier)
        reports.append(evaluate(held.labels, pred, ds.class_names))
    return CvResult(
        reports,
        float(np.mean([r.weighted_precision for r in reports])),
        float(np.mean([r.weighted_recall for r in reports])),
        float(np.mean([r.weighted_f1 for r in reports])),
    )
