"""26-feature vectors per review comment, quantile discretization, and the
two-stage feature-selection pipeline (correlation pruning, then recursive
elimination driven by cross-validated minority-class F1).

The vector is one TF-IDF block over the comment message plus 25 named
scalars. The block is exempt from Pearson pruning and discretization and
is treated as a single droppable unit during recursive elimination.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import textfeat
from .ingest.context import change_trigger, experience, thread_context
from .ingest.dump import ReviewDump
from .learn.cv import classification_scores, stratified_fold_indices
from .learn.training import AlgorithmConfig, train
from .model import ChangeStatus, ReviewChange, ReviewComment

SCALAR_FEATURES: tuple[str, ...] = (
    "comment_sentiment",
    "question_ratio",
    "code_element_number",
    "code_element_ratio",
    "similarity",
    "readability",
    "word_count",
    "stop_word_ratio",
    "author_responded",
    "review_interval",
    "patch_id",
    "num_patches",
    "change_trigger",
    "line_change",
    "confirmatory_response",
    "gratitude",
    "reply_sentiment",
    "is_last_patch",
    "thread_length",
    "num_participant",
    "review_status",
    "code_reviewership",
    "code_ownership",
    "reviewing_experience",
    "developer_experience",
)

TFIDF_FEATURE = "tfidf_block"
ALL_FEATURES: tuple[str, ...] = (TFIDF_FEATURE,) + SCALAR_FEATURES

DISCRETIZED_FEATURES: tuple[str, ...] = (
    "review_interval",
    "similarity",
    "readability",
    "line_change",
    "word_count",
    "thread_length",
    "code_reviewership",
    "code_ownership",
    "reviewing_experience",
    "developer_experience",
)

REVIEW_STATUS_CODES = {
    ChangeStatus.ABANDONED: 0,
    ChangeStatus.MERGED: 1,
    ChangeStatus.OPEN: 2,
}

_SCALAR_INDEX = {name: i for i, name in enumerate(SCALAR_FEATURES)}


class EmptyTrainingSet(ValueError):
    """Discretizer fitting needs at least one vector."""


class TooFewSamples(ValueError):
    """Recursive elimination needs at least `folds` samples per class."""


@dataclass(frozen=True)
class FeatureVector:
    """TF-IDF block plus the 25 scalars, ordered as SCALAR_FEATURES."""

    tfidf_block: np.ndarray
    scalars: np.ndarray
    similarity_missing: bool = False

    def __post_init__(self):
        if len(self.scalars) != len(SCALAR_FEATURES):
            raise ValueError(f"expected {len(SCALAR_FEATURES)} scalars, got {len(self.scalars)}")

    def scalar(self, name: str) -> float:
        return float(self.scalars[_SCALAR_INDEX[name]])

    def as_dict(self) -> dict[str, float]:
        return {name: float(v) for name, v in zip(SCALAR_FEATURES, self.scalars)}


def strip_stopwords(text: str, stopwords: frozenset[str]) -> str:
    return " ".join(t for t in textfeat.tokenize(text) if t not in stopwords)


def strip_code_syntax(text: str, stopwords: frozenset[str], keywords: frozenset[str]) -> str:
    return " ".join(
        t for t in textfeat.tokenize(text) if t not in stopwords and t not in keywords
    )


def extract(
    comment: ReviewComment,
    change: ReviewChange,
    history: ReviewDump,
    vectorizer: textfeat.Vectorizer,
    lexicons: textfeat.Lexicons | None = None,
) -> FeatureVector:
    """Assemble the full vector for one comment.

    A missing code-context snippet is not an error: similarity becomes 0
    and the vector is flagged via similarity_missing.
    """
    if lexicons is None:
        lexicons = textfeat.load_default_lexicons()
    text = comment.text
    tokens = textfeat.tokenize(text)
    code_count, code_ratio = textfeat.code_element_stats(text, lexicons.keywords)

    ctx = thread_context(comment, change)
    trigger = change_trigger(comment, change)
    reply = textfeat.reply_signals(
        list(ctx.reply_texts), lexicons.sentiment, lexicons.confirmatory, lexicons.gratitude
    )
    thread = change.thread(comment.thread_id)
    exp = experience(
        history,
        reviewer_id=comment.author_id,
        author_id=change.author_id,
        file_path=thread.file_path,
        project_id=change.project_id,
        as_of=comment.written_at,
    )

    message_vec = textfeat.transform(vectorizer, strip_stopwords(text, lexicons.stopwords))
    code_context = history.code_contexts.get(comment.comment_id)
    similarity_missing = code_context is None
    if similarity_missing:
        similarity = 0.0
    else:
        code_vec = textfeat.transform(
            vectorizer, strip_code_syntax(code_context, lexicons.stopwords, lexicons.keywords)
        )
        similarity = textfeat.cosine_similarity(message_vec, code_vec)

    scalars = np.zeros(len(SCALAR_FEATURES), np.float64)
    values = {
        "comment_sentiment": textfeat.sentiment(text, lexicons.sentiment),
        "question_ratio": textfeat.question_ratio(text),
        "code_element_number": code_count,
        "code_element_ratio": code_ratio,
        "similarity": similarity,
        "readability": textfeat.readability(text),
        "word_count": len(tokens),
        "stop_word_ratio": textfeat.stop_word_ratio(text, lexicons.stopwords),
        "author_responded": int(ctx.author_responded),
        "review_interval": ctx.review_interval,
        "patch_id": ctx.patch_id,
        "num_patches": ctx.num_patches,
        "change_trigger": int(trigger.triggered),
        "line_change": trigger.line_change,
        "confirmatory_response": int(reply.confirmatory),
        "gratitude": int(reply.gratitude),
        "reply_sentiment": reply.reply_sentiment,
        "is_last_patch": int(ctx.is_last_patch),
        "thread_length": ctx.thread_length,
        "num_participant": ctx.num_participant,
        "review_status": REVIEW_STATUS_CODES[ctx.review_status],
        "code_reviewership": exp.code_reviewership,
        "code_ownership": exp.code_ownership,
        "reviewing_experience": exp.reviewing_experience,
        "developer_experience": exp.developer_experience,
    }
    for name, value in values.items():
        scalars[_SCALAR_INDEX[name]] = value
    if not np.isfinite(scalars).all():
        bad = [n for n, v in values.items() if not np.isfinite(v)]
        raise ValueError(f"non-finite feature value(s): {bad}")
    return FeatureVector(
        tfidf_block=message_vec,
        scalars=scalars,
        similarity_missing=similarity_missing,
    )


@dataclass(frozen=True)
class FeatureMatrix:
    """Row-aligned scalar and TF-IDF matrices for a batch of comments."""

    scalars: np.ndarray
    tfidf: np.ndarray

    @property
    def n_rows(self) -> int:
        return len(self.scalars)

    def column(self, name: str) -> np.ndarray:
        return self.scalars[:, _SCALAR_INDEX[name]]

    def stack(self, selected: tuple[str, ...] | None = None) -> np.ndarray:
        """Design matrix: selected scalars (spec order) then the TF-IDF
        block when selected. None means every feature."""
        if selected is None:
            selected = ALL_FEATURES
        chosen = set(selected)
        parts = []
        scalar_idx = [i for i, n in enumerate(SCALAR_FEATURES) if n in chosen]
        if scalar_idx:
            parts.append(self.scalars[:, scalar_idx])
        if TFIDF_FEATURE in chosen and self.tfidf.shape[1] > 0:
            parts.append(self.tfidf)
        if not parts:
            return np.empty((self.n_rows, 0))
        return np.hstack(parts)

    def scalar_column_count(self, selected: tuple[str, ...] | None = None) -> int:
        if selected is None:
            return len(SCALAR_FEATURES)
        chosen = set(selected)
        return sum(1 for n in SCALAR_FEATURES if n in chosen)


def matrix_from_vectors(vectors: list[FeatureVector]) -> FeatureMatrix:
    if not vectors:
        raise EmptyTrainingSet("no feature vectors")
    return FeatureMatrix(
        scalars=np.vstack([v.scalars for v in vectors]),
        tfidf=np.vstack([v.tfidf_block for v in vectors]),
    )


@dataclass(frozen=True)
class Discretizer:
    """Quantile bin edges for the ratio-scale scalar features.

    A raw value maps to the number of edges at or below it, so values
    under the lowest edge clamp to bin 0 and values past the highest edge
    clamp to the top bin. Features missing from `edges` pass through.
    """

    edges: dict[str, tuple[float, ...]]
    q: int = 4

    def bin_value(self, name: str, value: float) -> float:
        feature_edges = self.edges.get(name)
        if not feature_edges:
            return 0.0 if name in self.edges else value
        return float(np.searchsorted(feature_edges, value, side="right"))

    def apply(self, fv: FeatureVector) -> FeatureVector:
        scalars = fv.scalars.copy()
        for name in self.edges:
            i = _SCALAR_INDEX[name]
            scalars[i] = self.bin_value(name, scalars[i])
        return replace(fv, scalars=scalars)

    def apply_matrix(self, matrix: FeatureMatrix) -> FeatureMatrix:
        scalars = matrix.scalars.copy()
        for name, feature_edges in self.edges.items():
            i = _SCALAR_INDEX[name]
            if feature_edges:
                scalars[:, i] = np.searchsorted(feature_edges, scalars[:, i], side="right")
            else:
                scalars[:, i] = 0.0
        return FeatureMatrix(scalars=scalars, tfidf=matrix.tfidf)


def fit_discretizer(
    matrix: FeatureMatrix,
    q: int = 4,
    features: tuple[str, ...] = DISCRETIZED_FEATURES,
) -> Discretizer:
    if matrix.n_rows == 0:
        raise EmptyTrainingSet("cannot fit a discretizer on zero rows")
    edges: dict[str, tuple[float, ...]] = {}
    probs = np.arange(1, q) / q
    for name in features:
        col = matrix.column(name)
        quantiles = np.unique(np.quantile(col, probs))
        # An edge at or past the maximum would separate nothing; dropping
        # it also collapses constant features to a single bin 0.
        quantiles = quantiles[quantiles < col.max()]
        edges[name] = tuple(float(e) for e in quantiles)
    return Discretizer(edges=edges, q=q)


@dataclass(frozen=True)
class FeatureSelection:
    """Audit-friendly record of both selection stages."""

    kept_after_correlation: tuple[str, ...]
    final_selected: tuple[str, ...]
    audit_log: tuple[dict, ...] = field(default_factory=tuple)

    def to_json_obj(self) -> dict:
        return {
            "kept_after_correlation": list(self.kept_after_correlation),
            "final_selected": list(self.final_selected),
            "audit_log": [dict(entry) for entry in self.audit_log],
        }


def _point_biserial(col: np.ndarray, y: np.ndarray) -> float:
    # Identical to Pearson r against the 0/1 label.
    if col.std() == 0 or y.std() == 0:
        return 0.0
    return float(np.corrcoef(col, y)[0, 1])


def drop_correlated(
    matrix: FeatureMatrix,
    y: np.ndarray,
    threshold: float = 0.9,
) -> FeatureSelection:
    """Stage 1: prune near-duplicate scalars.

    Features linked by |Pearson r| >= threshold form clusters; each
    cluster keeps its member with the highest |point-biserial| against the
    label. Zero-variance features are dropped as degenerate. The TF-IDF
    block is exempt and always kept.
    """
    y = np.asarray(y, dtype=np.float64)
    audit: list[dict] = []
    names = list(SCALAR_FEATURES)
    X = matrix.scalars

    variances = X.std(axis=0)
    live = [i for i in range(len(names)) if variances[i] > 0]
    for i in range(len(names)):
        if variances[i] == 0:
            audit.append({"feature": names[i], "action": "dropped", "reason": "degenerate",
                          "detail": "zero variance"})

    corr_label = {i: _point_biserial(X[:, i], y) for i in live}

    parent = {i: i for i in live}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    pair_r: dict[tuple[int, int], float] = {}
    for a in range(len(live)):
        for b in range(a + 1, len(live)):
            i, j = live[a], live[b]
            r = float(np.corrcoef(X[:, i], X[:, j])[0, 1])
            if abs(r) >= threshold:
                pair_r[(i, j)] = r
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    clusters: dict[int, list[int]] = {}
    for i in live:
        clusters.setdefault(find(i), []).append(i)

    kept: list[str] = []
    for members in clusters.values():
        best = max(members, key=lambda i: (abs(corr_label[i]), -i))
        kept.append(names[best])
        for i in members:
            if i == best:
                continue
            linked = [r for (a, b), r in pair_r.items() if best in (a, b) and i in (a, b)]
            audit.append({
                "feature": names[i],
                "action": "dropped",
                "reason": "correlated",
                "kept": names[best],
                "pearson_r": linked[0] if linked else None,
                "point_biserial_dropped": corr_label[i],
                "point_biserial_kept": corr_label[best],
            })
    kept_ordered = tuple(n for n in SCALAR_FEATURES if n in set(kept)) + (TFIDF_FEATURE,)
    return FeatureSelection(
        kept_after_correlation=kept_ordered,
        final_selected=kept_ordered,
        audit_log=tuple(audit),
    )


def _unit_importances(model, units: list[str], matrix_widths: dict[str, int]) -> dict[str, float]:
    if hasattr(model, "feature_importances_"):
        importances = np.abs(model.feature_importances_)
    else:
        importances = np.abs(model.weights)
    out: dict[str, float] = {}
    pos = 0
    for unit in units:
        width = matrix_widths[unit]
        out[unit] = float(importances[pos:pos + width].sum())
        pos += width
    return out


def _cv_minority_f1(X: np.ndarray, y: np.ndarray, config: AlgorithmConfig,
                    fold_of: np.ndarray, folds: int, seed: int) -> float:
    scores = []
    for f in range(folds):
        test = fold_of == f
        model = train(config, X[~test], y[~test], seed=seed)
        _, _, _, f1, _ = classification_scores(y[test], model.predict(X[test]))
        minority = int(np.argmin(np.bincount(y, minlength=2)))
        scores.append(f1[minority])
    return float(np.mean(scores))


def rfe_cv(
    matrix: FeatureMatrix,
    y: np.ndarray,
    estimator_config: AlgorithmConfig,
    folds: int = 10,
    seed: int = 0,
    start_from: FeatureSelection | None = None,
) -> FeatureSelection:
    """Stage 2: recursive elimination maximizing minority-class F1.

    Starting from the stage-1 survivors, repeatedly drops the least
    important unit (the TF-IDF block counts as one unit) and scores each
    candidate set with k-fold CV. Returns the set with the best mean F1;
    ties go to the smaller set. Folds are fixed once from the seed, so the
    whole procedure is deterministic.
    """
    y = np.asarray(y, dtype=np.int64)
    if start_from is None:
        start_from = FeatureSelection(
            kept_after_correlation=tuple(SCALAR_FEATURES) + (TFIDF_FEATURE,),
            final_selected=tuple(SCALAR_FEATURES) + (TFIDF_FEATURE,),
        )
    _, counts = np.unique(y, return_counts=True)
    if counts.min() < folds:
        raise TooFewSamples(f"smallest class has {counts.min()} samples, need >= {folds}")

    units = [n for n in ALL_FEATURES if n in set(start_from.kept_after_correlation)]
    if TFIDF_FEATURE in units and matrix.tfidf.shape[1] == 0:
        units.remove(TFIDF_FEATURE)
    widths = {n: 1 for n in SCALAR_FEATURES}
    widths[TFIDF_FEATURE] = matrix.tfidf.shape[1]

    fold_of = stratified_fold_indices(y, folds, np.random.default_rng([seed, 0]))
    audit: list[dict] = list(start_from.audit_log)
    history: list[tuple[float, tuple[str, ...]]] = []

    current = list(units)
    while current:
        ordered = tuple(n for n in ALL_FEATURES if n in set(current))
        X = matrix.stack(ordered)
        f1 = _cv_minority_f1(X, y, estimator_config, fold_of, folds, seed)
        history.append((f1, ordered))
        audit.append({"action": "scored", "features": list(ordered),
                      "minority_f1": f1, "size": len(ordered)})
        if len(current) == 1:
            break
        model = train(estimator_config, X, y, seed=seed)
        scalar_units = [n for n in ordered if n != TFIDF_FEATURE]
        layout = scalar_units + ([TFIDF_FEATURE] if TFIDF_FEATURE in ordered else [])
        unit_imp = _unit_importances(model, layout, widths)
        weakest = min(layout, key=lambda n: (unit_imp[n], -layout.index(n)))
        audit.append({"action": "eliminated", "feature": weakest,
                      "importance": unit_imp[weakest]})
        current.remove(weakest)

    best_f1 = max(f1 for f1, _ in history)
    candidates = [features for f1, features in history if f1 == best_f1]
    final = min(candidates, key=len)
    audit.append({"action": "selected", "features": list(final), "minority_f1": best_f1})
    return FeatureSelection(
        kept_after_correlation=start_from.kept_after_correlation,
        final_selected=final,
        audit_log=tuple(audit),
    )
