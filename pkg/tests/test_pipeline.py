import numpy as np
import pytest

from reviewlens import features, pipeline, textfeat
from reviewlens.learn import DEFAULT_CONFIGS, model_from_json, model_to_json
from synth import make_dump, make_labels


@pytest.fixture(scope="module")
def trained(small_dump_module, small_labels_module):
    dump, _ = small_dump_module
    artifact, selection = pipeline.train_from_labels(
        dump, small_labels_module, DEFAULT_CONFIGS["dt"], seed=7, selection_folds=3
    )
    return dump, artifact, selection


@pytest.fixture(scope="module")
def small_dump_module():
    return make_dump(16, 3, seed=3)


@pytest.fixture(scope="module")
def small_labels_module(small_dump_module):
    dump, truth = small_dump_module
    return make_labels(dump, truth, seed=11)


class TestCorpus:
    def test_order_is_deterministic(self, small_dump_module):
        dump, _ = small_dump_module
        lex = textfeat.load_default_lexicons()
        assert pipeline.corpus_of(dump, lex) == pipeline.corpus_of(dump, lex)

    def test_includes_comments_and_contexts(self, small_dump_module):
        dump, _ = small_dump_module
        lex = textfeat.load_default_lexicons()
        corpus = pipeline.corpus_of(dump, lex)
        n_comments = sum(len(c.all_comments()) for c in dump.changes)
        assert len(corpus) == n_comments + len(dump.code_contexts)


class TestFeaturize:
    def test_ids_sorted_and_aligned(self, small_dump_module):
        dump, _ = small_dump_module
        vec = pipeline.build_vectorizer(dump)
        ids, matrix = pipeline.featurize(dump, vec)
        assert ids == sorted(ids)
        assert matrix.scalars.shape[0] == len(ids)

    def test_subset_filter(self, small_dump_module):
        dump, _ = small_dump_module
        vec = pipeline.build_vectorizer(dump)
        all_ids, _ = pipeline.featurize(dump, vec)
        want = set(all_ids[:5])
        ids, matrix = pipeline.featurize(dump, vec, comment_ids=want)
        assert set(ids) == want
        assert matrix.scalars.shape[0] == 5

    def test_empty_selection_rejected(self, small_dump_module):
        dump, _ = small_dump_module
        vec = pipeline.build_vectorizer(dump)
        with pytest.raises(pipeline.UnlabeledTrainingData):
            pipeline.featurize(dump, vec, comment_ids={"no-such-comment"})


class TestLatestLabels:
    def test_most_recent_wins(self, small_labels_module):
        labels = small_labels_module
        first = labels[0]
        from dataclasses import replace
        from datetime import timedelta
        flipped = replace(
            first,
            is_useful=not first.is_useful,
            labeled_at=first.labeled_at + timedelta(days=5),
        )
        verdicts = pipeline.latest_labels(list(labels) + [flipped])
        assert verdicts[first.comment_id] == flipped.is_useful

    def test_single_pass(self, small_labels_module):
        verdicts = pipeline.latest_labels(list(small_labels_module))
        assert len(verdicts) == len({lb.comment_id for lb in small_labels_module})


class TestTrainFromLabels:
    def test_artifact_is_complete(self, trained):
        _, artifact, selection = trained
        assert artifact.algorithm == "decision_tree"
        assert artifact.vocabulary
        assert len(artifact.idf) == len(artifact.vocabulary)
        assert artifact.selected_features
        assert artifact.metadata["n_training_rows"] > 0
        assert selection is not None

    def test_byte_identical_retrain(self, small_dump_module, small_labels_module):
        dump, _ = small_dump_module
        a1, _ = pipeline.train_from_labels(
            dump, small_labels_module, DEFAULT_CONFIGS["dt"], seed=7, selection_folds=3
        )
        a2, _ = pipeline.train_from_labels(
            dump, small_labels_module, DEFAULT_CONFIGS["dt"], seed=7, selection_folds=3
        )
        assert model_to_json(a1) == model_to_json(a2)

    def test_selection_can_be_skipped(self, small_dump_module, small_labels_module):
        dump, _ = small_dump_module
        artifact, selection = pipeline.train_from_labels(
            dump, small_labels_module, DEFAULT_CONFIGS["dt"], seed=7, run_selection=False
        )
        assert selection is None
        assert set(artifact.selected_features) == set(features.ALL_FEATURES)

    def test_single_class_labels_rejected(self, small_dump_module, small_labels_module):
        from dataclasses import replace
        dump, _ = small_dump_module
        uniform = [replace(lb, is_useful=True) for lb in small_labels_module]
        with pytest.raises(pipeline.UnlabeledTrainingData):
            pipeline.train_from_labels(dump, uniform, DEFAULT_CONFIGS["dt"])

    def test_no_labels_rejected(self, small_dump_module):
        dump, _ = small_dump_module
        with pytest.raises(pipeline.UnlabeledTrainingData):
            pipeline.train_from_labels(dump, [], DEFAULT_CONFIGS["dt"])


class TestPredict:
    def test_round_trip_through_json(self, trained):
        dump, artifact, _ = trained
        revived = model_from_json(model_to_json(artifact))
        direct = pipeline.predict_comments(artifact, dump)
        via_json = pipeline.predict_comments(revived, dump)
        assert direct == via_json

    def test_output_shape(self, trained):
        dump, artifact, _ = trained
        preds = pipeline.predict_comments(artifact, dump)
        n_comments = sum(len(c.all_comments()) for c in dump.changes)
        assert len(preds) == n_comments
        for comment_id, label, prob in preds:
            assert label in (pipeline.USEFUL, pipeline.NOT_USEFUL)
            assert 0.0 <= prob <= 1.0
        assert [p[0] for p in preds] == sorted(p[0] for p in preds)

    def test_label_matches_probability_threshold(self, trained):
        dump, artifact, _ = trained
        for _, label, prob in pipeline.predict_comments(artifact, dump):
            assert (label == pipeline.USEFUL) == (prob >= 0.5)

    def test_training_rows_mostly_recovered(self, trained, small_labels_module):
        # The tree saw these rows; it should agree with most of the labels.
        dump, artifact, _ = trained
        verdicts = pipeline.latest_labels(list(small_labels_module))
        preds = dict(
            (cid, label) for cid, label, _ in
            pipeline.predict_comments(artifact, dump, comment_ids=set(verdicts))
        )
        hits = sum(
            (preds[cid] == pipeline.USEFUL) == useful
            for cid, useful in verdicts.items()
        )
        assert hits / len(verdicts) >= 0.8

    def test_predict_one_agrees_with_batch(self, trained):
        dump, artifact, _ = trained
        vectorizer = pipeline.artifact_vectorizer(artifact)
        lex = textfeat.load_default_lexicons()
        comment, change = pipeline.iter_comments(dump)[0]
        fv = features.extract(comment, change, dump, vectorizer, lex)
        label, prob = pipeline.predict_one(artifact, fv)
        batch = pipeline.predict_comments(artifact, dump, {comment.comment_id})
        assert batch[0][1] == label
        assert batch[0][2] == pytest.approx(prob)


class TestArtifactHelpers:
    def test_vectorizer_round_trip(self, trained):
        _, artifact, _ = trained
        vec = pipeline.artifact_vectorizer(artifact)
        assert vec.vocabulary == artifact.vocabulary
        assert np.allclose(vec.idf, artifact.idf)

    def test_discretizer_round_trip(self, trained):
        _, artifact, _ = trained
        disc = pipeline.artifact_discretizer(artifact)
        assert disc.edges == artifact.bin_edges
        assert disc.q == artifact.metadata["discretizer_q"]
