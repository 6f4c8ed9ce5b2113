"""Repeated stratified cross-validation with fold-local oversampling.

Fold assignment depends only on (seed, repeat, labels), never on the
algorithm under evaluation, so two learners evaluated with the same seed
see byte-identical train/test sequences. Oversampling happens inside the
training partition of each fold; test rows are never synthesized from.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .smote import SingleMinoritySample, smote
from .training import AlgorithmConfig, algorithm_name, train


class TooFewSamples(ValueError):
    """Some class has fewer samples than requested folds."""


@dataclass(frozen=True)
class FoldScore:
    repeat: int
    fold: int
    accuracy: float
    precision: tuple[float, float]
    recall: tuple[float, float]
    f1: tuple[float, float]
    confusion: tuple[int, int, int, int]
    """Confusion counts as (tn, fp, fn, tp) with class 1 positive."""


@dataclass(frozen=True)
class EvaluationReport:
    algorithm: str
    repeats: int
    folds: int
    seed: int
    rows: tuple[FoldScore, ...]

    def scores(self, metric: str) -> np.ndarray:
        """Vector of one value per fold row.

        Accepted names: accuracy, precision_0/1, recall_0/1, f1_0/1.
        """
        if metric == "accuracy":
            return np.array([r.accuracy for r in self.rows])
        name, _, cls = metric.rpartition("_")
        if name in ("precision", "recall", "f1") and cls in ("0", "1"):
            idx = int(cls)
            return np.array([getattr(r, name)[idx] for r in self.rows])
        raise KeyError(f"unknown metric {metric!r}")

    def mean(self, metric: str) -> float:
        return float(self.scores(metric).mean())

    def summary(self) -> dict[str, float]:
        names = ["accuracy"] + [f"{m}_{c}" for m in ("precision", "recall", "f1") for c in "01"]
        return {name: self.mean(name) for name in names}


def classification_scores(y_true: np.ndarray, y_pred: np.ndarray):
    """Accuracy, per-class precision/recall/F1 and (tn, fp, fn, tp).

    Undefined ratios (empty denominators) score 0.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    tn = int(np.sum((y_true == 0) & (y_pred == 0)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    total = tp + tn + fp + fn
    accuracy = (tp + tn) / total if total else 0.0

    def _prf(tp_c, fp_c, fn_c):
        precision = tp_c / (tp_c + fp_c) if tp_c + fp_c else 0.0
        recall = tp_c / (tp_c + fn_c) if tp_c + fn_c else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return precision, recall, f1

    p1, r1, f1_1 = _prf(tp, fp, fn)
    p0, r0, f1_0 = _prf(tn, fn, fp)
    return accuracy, (p0, p1), (r0, r1), (f1_0, f1_1), (tn, fp, fn, tp)


def stratified_fold_indices(y: np.ndarray, folds: int, rng: np.random.Generator) -> np.ndarray:
    """Fold id per sample; class proportions per fold within one sample."""
    y = np.asarray(y)
    fold_of = np.empty(len(y), np.int64)
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        rng.shuffle(idx)
        fold_of[idx] = np.arange(len(idx)) % folds
    return fold_of


def _derived_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1, np.uint64)[0])


def cross_validate(
    X,
    y,
    config: AlgorithmConfig,
    repeats: int = 20,
    folds: int = 10,
    seed: int = 0,
    use_smote: bool = True,
    smote_k: int = 5,
    distance_columns: np.ndarray | None = None,
) -> EvaluationReport:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    _, counts = np.unique(y, return_counts=True)
    if counts.min() < folds:
        raise TooFewSamples(f"smallest class has {counts.min()} samples, need >= {folds}")
    rows = []
    for r in range(repeats):
        fold_rng = np.random.default_rng([seed, r])
        fold_of = stratified_fold_indices(y, folds, fold_rng)
        for f in range(folds):
            test_mask = fold_of == f
            X_train, y_train = X[~test_mask], y[~test_mask]
            if use_smote:
                X_train, y_train = _oversample(
                    X_train, y_train, smote_k, _derived_seed(seed, r, f), distance_columns
                )
            model = train(config, X_train, y_train, seed=_derived_seed(seed, r, f, 1))
            y_pred = model.predict(X[test_mask])
            accuracy, precision, recall, f1, confusion = classification_scores(y[test_mask], y_pred)
            rows.append(
                FoldScore(
                    repeat=r,
                    fold=f,
                    accuracy=accuracy,
                    precision=precision,
                    recall=recall,
                    f1=f1,
                    confusion=confusion,
                )
            )
    return EvaluationReport(
        algorithm=algorithm_name(config),
        repeats=repeats,
        folds=folds,
        seed=seed,
        rows=tuple(rows),
    )


def _oversample(X_train, y_train, k, seed, distance_columns):
    classes, counts = np.unique(y_train, return_counts=True)
    if len(classes) != 2 or counts.min() == counts.max():
        return X_train, y_train
    minority = classes[np.argmin(counts)]
    try:
        return smote(
            X_train[y_train == minority],
            X_train,
            y_train,
            k=k,
            seed=seed,
            distance_columns=distance_columns,
        )
    except SingleMinoritySample:
        return X_train, y_train
