"""L2-regularized logistic regression fitted with L-BFGS-B."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize


@dataclass(frozen=True)
class LogisticRegressionConfig:
    l2_strength: float = 1.0
    tol: float = 1e-6
    max_iter: int = 1000
    fit_intercept: bool = True
    standardize: bool = True


@dataclass(frozen=True)
class LogisticRegressionModel:
    config: LogisticRegressionConfig
    weights: np.ndarray
    intercept: float
    center: np.ndarray
    scale: np.ndarray
    n_features: int
    seed: int

    def decision(self, X: np.ndarray) -> np.ndarray:
        Xs = (np.asarray(X, dtype=np.float64) - self.center) / self.scale
        return Xs @ self.weights + self.intercept

    def predict_proba1(self, X: np.ndarray) -> np.ndarray:
        z = self.decision(X)
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba1(X) >= 0.5).astype(np.int64)


def fit_logistic_regression(X, y, config: LogisticRegressionConfig = LogisticRegressionConfig(),
                            seed: int = 0) -> LogisticRegressionModel:
    """Deterministic fit; `seed` is accepted for interface symmetry only."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, d = X.shape
    if config.standardize:
        center = X.mean(axis=0)
        scale = X.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
    else:
        center = np.zeros(d)
        scale = np.ones(d)
    Xs = (X - center) / scale
    sign = np.where(y == 1, 1.0, -1.0)
    lam = config.l2_strength

    def objective(theta):
        w = theta[:d]
        b = theta[d] if config.fit_intercept else 0.0
        margin = sign * (Xs @ w + b)
        loss = np.logaddexp(0.0, -margin).sum() + 0.5 * lam * (w @ w)
        # d/dmargin logaddexp(0, -m) = -sigmoid(-m)
        coeff = -sign * _sigmoid(-margin)
        grad_w = Xs.T @ coeff + lam * w
        grad = np.empty_like(theta)
        grad[:d] = grad_w
        if config.fit_intercept:
            grad[d] = coeff.sum()
        return loss, grad

    size = d + 1 if config.fit_intercept else d
    result = minimize(objective, np.zeros(size), jac=True, method="L-BFGS-B",
                      tol=config.tol, options={"maxiter": config.max_iter})
    theta = result.x
    return LogisticRegressionModel(
        config=config,
        weights=theta[:d].copy(),
        intercept=float(theta[d]) if config.fit_intercept else 0.0,
        center=center,
        scale=scale,
        n_features=d,
        seed=seed,
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out
