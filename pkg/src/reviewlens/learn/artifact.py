"""Self-contained model artifacts: versioned JSON with everything needed
to turn raw review data into a prediction (vocabulary, idf weights,
discretizer edges, selected feature ids, fitted parameters)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .logistic import LogisticRegressionConfig, LogisticRegressionModel
from .trees import (
    DecisionTreeConfig,
    DecisionTreeModel,
    RandomForestConfig,
    RandomForestModel,
    TreeArrays,
)

ARTIFACT_VERSION = 1
MAGIC = "reviewlens-model"


class ArtifactVersionMismatch(ValueError):
    """Artifact was written by an incompatible build."""


class SchemaMismatch(ValueError):
    """Feature matrix does not match the model's selected features."""


@dataclass(frozen=True)
class TrainedModel:
    algorithm: str
    hyperparams: dict
    seed: int
    vocabulary: dict[str, int]
    idf: tuple[float, ...]
    bin_edges: dict[str, tuple[float, ...]]
    selected_features: tuple[str, ...]
    params: dict
    artifact_version: int = ARTIFACT_VERSION
    metadata: dict = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return int(self.params["n_features"])


def _tree_to_obj(tree: TreeArrays) -> dict:
    return {
        "feature": tree.feature.tolist(),
        "threshold": tree.threshold.tolist(),
        "left": tree.left.tolist(),
        "right": tree.right.tolist(),
        "count0": tree.count0.tolist(),
        "count1": tree.count1.tolist(),
    }


def _tree_from_obj(obj: dict) -> TreeArrays:
    return TreeArrays(
        feature=np.array(obj["feature"], np.int64),
        threshold=np.array(obj["threshold"], np.float64),
        left=np.array(obj["left"], np.int64),
        right=np.array(obj["right"], np.int64),
        count0=np.array(obj["count0"], np.int64),
        count1=np.array(obj["count1"], np.int64),
    )


def encode_fitted(model) -> tuple[str, dict, dict]:
    """(algorithm name, hyperparams, params) for a fitted runtime model."""
    if isinstance(model, DecisionTreeModel):
        hyper = {
            "max_depth": model.config.max_depth,
            "min_samples_split": model.config.min_samples_split,
            "max_features": model.config.max_features,
        }
        params = {
            "n_features": model.n_features,
            "tree": _tree_to_obj(model.tree),
            "feature_importances": model.feature_importances_.tolist(),
        }
        return "decision_tree", hyper, params
    if isinstance(model, RandomForestModel):
        hyper = {
            "n_trees": model.config.n_trees,
            "max_depth": model.config.max_depth,
            "min_samples_split": model.config.min_samples_split,
            "max_features": model.config.max_features,
            "bootstrap": model.config.bootstrap,
        }
        params = {
            "n_features": model.n_features,
            "trees": [_tree_to_obj(t) for t in model.trees],
            "feature_importances": model.feature_importances_.tolist(),
        }
        return "random_forest", hyper, params
    if isinstance(model, LogisticRegressionModel):
        hyper = {
            "l2_strength": model.config.l2_strength,
            "tol": model.config.tol,
            "max_iter": model.config.max_iter,
            "fit_intercept": model.config.fit_intercept,
            "standardize": model.config.standardize,
        }
        params = {
            "n_features": model.n_features,
            "weights": model.weights.tolist(),
            "intercept": model.intercept,
            "center": model.center.tolist(),
            "scale": model.scale.tolist(),
        }
        return "logistic_regression", hyper, params
    raise TypeError(f"cannot encode {type(model).__name__}")


def runtime_model(artifact: TrainedModel):
    """Rebuild the fitted estimator embedded in an artifact."""
    params = artifact.params
    hyper = artifact.hyperparams
    if artifact.algorithm == "decision_tree":
        config = DecisionTreeConfig(
            max_depth=hyper["max_depth"],
            min_samples_split=hyper["min_samples_split"],
            max_features=hyper["max_features"],
        )
        return DecisionTreeModel(
            config=config,
            tree=_tree_from_obj(params["tree"]),
            n_features=params["n_features"],
            feature_importances_=np.array(params["feature_importances"], np.float64),
            seed=artifact.seed,
        )
    if artifact.algorithm == "random_forest":
        config = RandomForestConfig(
            n_trees=hyper["n_trees"],
            max_depth=hyper["max_depth"],
            min_samples_split=hyper["min_samples_split"],
            max_features=hyper["max_features"],
            bootstrap=hyper["bootstrap"],
        )
        return RandomForestModel(
            config=config,
            trees=tuple(_tree_from_obj(t) for t in params["trees"]),
            n_features=params["n_features"],
            feature_importances_=np.array(params["feature_importances"], np.float64),
            seed=artifact.seed,
        )
    if artifact.algorithm == "logistic_regression":
        config = LogisticRegressionConfig(
            l2_strength=hyper["l2_strength"],
            tol=hyper["tol"],
            max_iter=hyper["max_iter"],
            fit_intercept=hyper["fit_intercept"],
            standardize=hyper["standardize"],
        )
        return LogisticRegressionModel(
            config=config,
            weights=np.array(params["weights"], np.float64),
            intercept=params["intercept"],
            center=np.array(params["center"], np.float64),
            scale=np.array(params["scale"], np.float64),
            n_features=params["n_features"],
            seed=artifact.seed,
        )
    raise ArtifactVersionMismatch(f"unknown algorithm {artifact.algorithm!r}")


def predict_matrix(artifact: TrainedModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(labels, positive-class probabilities) for already-assembled rows."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != artifact.n_features:
        got = X.shape[1] if X.ndim == 2 else None
        raise SchemaMismatch(
            f"model expects {artifact.n_features} feature columns, got {got}"
        )
    model = runtime_model(artifact)
    probs = model.predict_proba1(X)
    return (probs >= 0.5).astype(np.int64), probs


def model_to_json(artifact: TrainedModel) -> bytes:
    obj = {
        "magic": MAGIC,
        "artifact_version": artifact.artifact_version,
        "algorithm": artifact.algorithm,
        "hyperparams": artifact.hyperparams,
        "seed": artifact.seed,
        "vocabulary": artifact.vocabulary,
        "idf": list(artifact.idf),
        "bin_edges": {k: list(v) for k, v in artifact.bin_edges.items()},
        "selected_features": list(artifact.selected_features),
        "params": artifact.params,
        "metadata": artifact.metadata,
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def model_from_json(data: bytes) -> TrainedModel:
    try:
        obj = json.loads(data.decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ArtifactVersionMismatch(f"not a model artifact: {exc}") from None
    if not isinstance(obj, dict) or obj.get("magic") != MAGIC:
        raise ArtifactVersionMismatch("not a model artifact (missing magic header)")
    if obj.get("artifact_version") != ARTIFACT_VERSION:
        raise ArtifactVersionMismatch(
            f"artifact_version {obj.get('artifact_version')!r}, expected {ARTIFACT_VERSION}"
        )
    return TrainedModel(
        algorithm=obj["algorithm"],
        hyperparams=obj["hyperparams"],
        seed=obj["seed"],
        vocabulary=obj["vocabulary"],
        idf=tuple(obj["idf"]),
        bin_edges={k: tuple(v) for k, v in obj["bin_edges"].items()},
        selected_features=tuple(obj["selected_features"]),
        params=obj["params"],
        metadata=obj.get("metadata", {}),
    )


def save_model(artifact: TrainedModel, path: str | Path) -> None:
    Path(path).write_bytes(model_to_json(artifact))


def load_model(path: str | Path) -> TrainedModel:
    return model_from_json(Path(path).read_bytes())
