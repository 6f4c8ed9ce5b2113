"""End-to-end composition: review dump in, trained artifact or
predictions out. Everything downstream of here works on the artifact
alone, so a model file is portable across processes and hosts."""

from __future__ import annotations

import numpy as np

from . import features, textfeat
from .ingest.dump import ReviewDump
from .learn.artifact import SchemaMismatch, TrainedModel, encode_fitted, predict_matrix
from .learn.training import AlgorithmConfig, train
from .model import ReviewChange, ReviewComment, UsefulnessLabel

USEFUL = "useful"
NOT_USEFUL = "not_useful"


class UnlabeledTrainingData(ValueError):
    """No usable (comment, label) pairs were found."""


def corpus_of(dump: ReviewDump, lexicons: textfeat.Lexicons) -> list[str]:
    """Stopword-stripped message texts plus syntax-stripped code contexts,
    in deterministic order."""
    texts = []
    for change in sorted(dump.changes, key=lambda c: c.change_id):
        for comment in change.all_comments():
            texts.append(features.strip_stopwords(comment.text, lexicons.stopwords))
    for comment_id in sorted(dump.code_contexts):
        texts.append(
            features.strip_code_syntax(
                dump.code_contexts[comment_id], lexicons.stopwords, lexicons.keywords
            )
        )
    return texts


def build_vectorizer(
    dump: ReviewDump, lexicons: textfeat.Lexicons | None = None
) -> textfeat.Vectorizer:
    lexicons = lexicons or textfeat.load_default_lexicons()
    return textfeat.fit_vectorizer(corpus_of(dump, lexicons))


def iter_comments(dump: ReviewDump):
    """(comment, change) pairs ordered by comment id."""
    pairs: list[tuple[ReviewComment, ReviewChange]] = []
    for change in dump.changes:
        for comment in change.all_comments():
            pairs.append((comment, change))
    pairs.sort(key=lambda pair: pair[0].comment_id)
    return pairs


def featurize(
    dump: ReviewDump,
    vectorizer: textfeat.Vectorizer,
    lexicons: textfeat.Lexicons | None = None,
    comment_ids: set[str] | None = None,
) -> tuple[list[str], features.FeatureMatrix]:
    lexicons = lexicons or textfeat.load_default_lexicons()
    ids = []
    vectors = []
    for comment, change in iter_comments(dump):
        if comment_ids is not None and comment.comment_id not in comment_ids:
            continue
        vectors.append(features.extract(comment, change, dump, vectorizer, lexicons))
        ids.append(comment.comment_id)
    if not vectors:
        raise UnlabeledTrainingData("no comments to featurize")
    return ids, features.matrix_from_vectors(vectors)


def latest_labels(labels: list[UsefulnessLabel]) -> dict[str, bool]:
    """comment_id -> is_useful, most recent label winning."""
    best: dict[str, tuple] = {}
    for label in labels:
        key = (label.labeled_at, label.rater_id)
        if label.comment_id not in best or key > best[label.comment_id][0]:
            best[label.comment_id] = (key, label.is_useful)
    return {cid: useful for cid, (_, useful) in best.items()}


def train_from_labels(
    dump: ReviewDump,
    labels: list[UsefulnessLabel],
    config: AlgorithmConfig,
    seed: int = 42,
    q: int = 4,
    run_selection: bool = True,
    selection_folds: int = 10,
) -> tuple[TrainedModel, features.FeatureSelection | None]:
    """Full training pipeline.

    Fits the vectorizer on the whole dump, extracts vectors for labeled
    comments, discretizes, optionally runs both selection stages (with
    the same estimator config), then trains on the surviving features.
    Deterministic for fixed inputs and seed; artifacts carry no
    timestamps so re-runs are byte-identical.
    """
    verdicts = latest_labels(labels)
    lexicons = textfeat.load_default_lexicons()
    vectorizer = build_vectorizer(dump, lexicons)
    ids, matrix = featurize(dump, vectorizer, lexicons, comment_ids=set(verdicts))
    y = np.array([int(verdicts[c]) for c in ids], np.int64)
    if len(np.unique(y)) < 2:
        raise UnlabeledTrainingData("labels cover a single class only")

    discretizer = features.fit_discretizer(matrix, q=q)
    binned = discretizer.apply_matrix(matrix)

    selection = None
    if run_selection:
        stage1 = features.drop_correlated(binned, y)
        folds = min(selection_folds, int(np.bincount(y).min()))
        if folds >= 2:
            selection = features.rfe_cv(
                binned, y, config, folds=folds, seed=seed, start_from=stage1
            )
        else:
            selection = stage1
        selected = selection.final_selected
    else:
        selected = features.ALL_FEATURES

    X = binned.stack(selected)
    model = train(config, X, y, seed=seed)
    algorithm, hyperparams, params = encode_fitted(model)
    artifact = TrainedModel(
        algorithm=algorithm,
        hyperparams=hyperparams,
        seed=seed,
        vocabulary=vectorizer.vocabulary,
        idf=tuple(float(v) for v in vectorizer.idf),
        bin_edges=dict(discretizer.edges),
        selected_features=tuple(selected),
        params=params,
        metadata={
            "n_training_rows": int(len(y)),
            "class_counts": {str(c): int(n) for c, n in zip(*np.unique(y, return_counts=True))},
            "discretizer_q": q,
        },
    )
    return artifact, selection


def artifact_vectorizer(artifact: TrainedModel) -> textfeat.Vectorizer:
    return textfeat.Vectorizer(
        vocabulary=dict(artifact.vocabulary),
        idf=np.array(artifact.idf, np.float64),
    )


def artifact_discretizer(artifact: TrainedModel) -> features.Discretizer:
    q = int(artifact.metadata.get("discretizer_q", 4))
    return features.Discretizer(edges=dict(artifact.bin_edges), q=q)


def predict_one(
    artifact: TrainedModel,
    fv: features.FeatureVector,
) -> tuple[str, float]:
    """(label, positive probability) for one raw (undiscretized) vector."""
    discretizer = artifact_discretizer(artifact)
    binned = discretizer.apply(fv)
    matrix = features.matrix_from_vectors([binned])
    expected_width = artifact.n_features
    X = matrix.stack(artifact.selected_features)
    if X.shape[1] != expected_width:
        raise SchemaMismatch(
            f"vector yields {X.shape[1]} columns, model expects {expected_width}"
        )
    labels, probs = predict_matrix(artifact, X)
    return (USEFUL if labels[0] == 1 else NOT_USEFUL), float(probs[0])


def predict_comments(
    artifact: TrainedModel,
    dump: ReviewDump,
    comment_ids: set[str] | None = None,
) -> list[tuple[str, str, float]]:
    """(comment_id, label, probability) triples, ordered by comment id."""
    lexicons = textfeat.load_default_lexicons()
    vectorizer = artifact_vectorizer(artifact)
    ids, matrix = featurize(dump, vectorizer, lexicons, comment_ids=comment_ids)
    discretizer = artifact_discretizer(artifact)
    binned = discretizer.apply_matrix(matrix)
    X = binned.stack(artifact.selected_features)
    labels, probs = predict_matrix(artifact, X)
    return [
        (cid, USEFUL if label == 1 else NOT_USEFUL, float(prob))
        for cid, label, prob in zip(ids, labels, probs)
    ]
