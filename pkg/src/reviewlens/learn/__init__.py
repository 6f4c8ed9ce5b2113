"""Supervised learners, oversampling, cross-validation and model comparison."""

from .artifact import (
    ARTIFACT_VERSION,
    ArtifactVersionMismatch,
    SchemaMismatch,
    TrainedModel,
    load_model,
    model_from_json,
    model_to_json,
    predict_matrix,
    runtime_model,
    save_model,
)
from .cv import (
    EvaluationReport,
    FoldScore,
    TooFewSamples,
    classification_scores,
    cross_validate,
    stratified_fold_indices,
)
from .logistic import LogisticRegressionConfig, LogisticRegressionModel, fit_logistic_regression
from .smote import SingleMinoritySample, smote
from .stats import (
    AllDifferencesZero,
    LengthMismatch,
    StatTestResult,
    compare,
    shapiro_wilk,
    wilcoxon_signed_rank,
)
from .training import (
    ALGORITHM_NAMES,
    DEFAULT_CONFIGS,
    NonFiniteFeature,
    SingleClassTraining,
    train,
)
from .trees import (
    DecisionTreeConfig,
    DecisionTreeModel,
    RandomForestConfig,
    RandomForestModel,
    fit_decision_tree,
    fit_random_forest,
)

__all__ = [
    "ALGORITHM_NAMES",
    "ARTIFACT_VERSION",
    "AllDifferencesZero",
    "DEFAULT_CONFIGS",
    "ArtifactVersionMismatch",
    "DecisionTreeConfig",
    "DecisionTreeModel",
    "EvaluationReport",
    "FoldScore",
    "LengthMismatch",
    "LogisticRegressionConfig",
    "LogisticRegressionModel",
    "NonFiniteFeature",
    "RandomForestConfig",
    "RandomForestModel",
    "SchemaMismatch",
    "SingleClassTraining",
    "SingleMinoritySample",
    "StatTestResult",
    "TooFewSamples",
    "TrainedModel",
    "classification_scores",
    "compare",
    "cross_validate",
    "fit_decision_tree",
    "fit_logistic_regression",
    "fit_random_forest",
    "load_model",
    "model_from_json",
    "model_to_json",
    "predict_matrix",
    "runtime_model",
    "save_model",
    "shapiro_wilk",
    "smote",
    "stratified_fold_indices",
    "train",
    "wilcoxon_signed_rank",
]
