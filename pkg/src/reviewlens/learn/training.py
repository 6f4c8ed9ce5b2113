"""Config-dispatched training entry point shared by CV and the CLI."""

from __future__ import annotations

import numpy as np

from .logistic import LogisticRegressionConfig, fit_logistic_regression
from .trees import (
    DecisionTreeConfig,
    RandomForestConfig,
    fit_decision_tree,
    fit_random_forest,
)

AlgorithmConfig = DecisionTreeConfig | RandomForestConfig | LogisticRegressionConfig


class SingleClassTraining(ValueError):
    """Training labels contain only one class."""


class NonFiniteFeature(ValueError):
    """Design matrix contains NaN or infinity."""


ALGORITHM_NAMES = {
    DecisionTreeConfig: "decision_tree",
    RandomForestConfig: "random_forest",
    LogisticRegressionConfig: "logistic_regression",
}

DEFAULT_CONFIGS = {
    "dt": DecisionTreeConfig(),
    "decision_tree": DecisionTreeConfig(),
    "rf": RandomForestConfig(),
    "random_forest": RandomForestConfig(),
    "lr": LogisticRegressionConfig(),
    "logistic_regression": LogisticRegressionConfig(),
}


def algorithm_name(config: AlgorithmConfig) -> str:
    return ALGORITHM_NAMES[type(config)]


def train(config: AlgorithmConfig, X, y, seed: int = 0):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if not np.isfinite(X).all():
        raise NonFiniteFeature("design matrix contains NaN or infinite values")
    if len(np.unique(y)) < 2:
        raise SingleClassTraining("labels contain a single class")
    if isinstance(config, DecisionTreeConfig):
        return fit_decision_tree(X, y, config, seed)
    if isinstance(config, RandomForestConfig):
        return fit_random_forest(X, y, config, seed)
    if isinstance(config, LogisticRegressionConfig):
        return fit_logistic_regression(X, y, config, seed)
    raise TypeError(f"unknown algorithm config {type(config).__name__}")
