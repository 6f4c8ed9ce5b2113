"""Minority oversampling by convex interpolation between near neighbors."""

from __future__ import annotations

import numpy as np


class SingleMinoritySample(ValueError):
    """Interpolation needs at least two minority samples."""


def smote(
    X_minority: np.ndarray,
    X: np.ndarray,
    y: np.ndarray,
    k: int = 5,
    seed: int = 0,
    distance_columns: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Append synthetic minority rows until the class counts are equal.

    Each synthetic row is x + lam * (neighbor - x) with lam ~ U[0,1] and the
    neighbor drawn among the k nearest minority samples. Distances are
    Euclidean over `distance_columns` when given (so sparse text blocks can
    be excluded), while interpolation always spans the full row. Original
    rows pass through unchanged.
    """
    X = np.asarray(X, dtype=np.float64)
    X_minority = np.asarray(X_minority, dtype=np.float64)
    y = np.asarray(y)
    classes, counts = np.unique(y, return_counts=True)
    if len(classes) != 2:
        raise ValueError(f"expected exactly 2 classes, got {len(classes)}")
    minority_label = classes[np.argmin(counts)]
    deficit = int(counts.max() - counts.min())
    n_min = len(X_minority)
    if deficit == 0:
        return X.copy(), y.copy()
    if n_min < 2:
        raise SingleMinoritySample(f"minority class has {n_min} sample(s)")
    k_eff = min(k, n_min - 1)

    base = X_minority if distance_columns is None else X_minority[:, distance_columns]
    sq = (base * base).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (base @ base.T)
    np.fill_diagonal(d2, np.inf)
    # Stable argsort keeps neighbor choice deterministic under distance ties.
    neighbor_ids = np.argsort(d2, axis=1, kind="stable")[:, :k_eff]

    rng = np.random.default_rng(seed)
    synthetic = np.empty((deficit, X.shape[1]), np.float64)
    for g in range(deficit):
        i = g % n_min
        j = neighbor_ids[i, rng.integers(0, k_eff)]
        lam = rng.random()
        synthetic[g] = X_minority[i] + lam * (X_minority[j] - X_minority[i])
    X_out = np.vstack([X, synthetic])
    y_out = np.concatenate([y, np.full(deficit, minority_label, dtype=y.dtype)])
    return X_out, y_out
