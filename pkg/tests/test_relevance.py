import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from storytrack.corpus import CorpusStream
from storytrack.entitylink import GazetteerLinker
from storytrack.features import FEATURE_COUNT, FeatureVector
from storytrack.relevance import (
    DEFAULT_STORY_SPECS,
    ForestConfig,
    ModelFormatError,
    RandomForestModel,
    StoryRepSpec,
    TrainingDataError,
    TrainingPair,
    _Tree,
    dumps_model,
    generate_training_pairs,
    load_model,
    load_pairs_csv,
    loads_model,
    predict_probabilities,
    predict_probability,
    save_model,
    train_forest,
    train_forest_arrays,
)
from conftest import make_doc


def fv_from(values):
    return FeatureVector.from_sequence(values)


def make_separable_pairs(n, rng_seed=0, threshold=5.0):
    """Random feature vectors whose label is decided by total_overlap."""
    rng = random.Random(rng_seed)
    pairs = []
    for _ in range(n):
        title = rng.randint(0, 6)
        body = rng.randint(0, 6)
        total = float(title + body)
        n_ents = max(title + body, rng.randint(1, 12))
        values = [
            float(rng.randint(1, 30)),        # story_doc_count
            float(rng.randint(2, 400)),       # story_node_count
            float(rng.randint(30, 3000)),     # doc_char_count
            float(n_ents),                    # doc_entity_count
            float(title), float(body), total,
            total / n_ents,
            rng.random(), rng.random(),
            rng.random() * title, rng.random() * body,
            0.0, 0.0,
        ]
        values[12] = values[10] + values[11]
        values[13] = values[12] / n_ents
        pairs.append(TrainingPair(fv_from(values), label=total > threshold))
    return pairs


def oracle_tree_predictions(X, y, min_leaf=1):
    """Independent exhaustive recursive partitioner (brute-force Gini over
    every feature and midpoint threshold; ties to lowest feature then
    threshold). Returns training-set predictions."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    pred = np.zeros(len(y))

    def gini(labels):
        if len(labels) == 0:
            return 0.0
        p = labels.mean()
        return 1.0 - p * p - (1.0 - p) * (1.0 - p)

    def best_split(idx):
        best = None
        n = len(idx)
        for f in range(X.shape[1]):
            vals = sorted(set(X[idx, f]))
            for a, b in zip(vals, vals[1:]):
                thr = (a + b) / 2.0
                left = idx[X[idx, f] <= thr]
                right = idx[X[idx, f] > thr]
                if len(left) < min_leaf or len(right) < min_leaf:
                    continue
                imp = (len(left) * gini(y[left]) + len(right) * gini(y[right])) / n
                key = (imp, f, thr)
                if best is None or key < best:
                    best = key
        return best

    def recurse(idx):
        labels = y[idx]
        if labels.mean() in (0.0, 1.0) or len(idx) < 2 * min_leaf:
            pred[idx] = labels.mean()
            return
        found = best_split(idx)
        if found is None:
            pred[idx] = labels.mean()
            return
        _, f, thr = found
        recurse(idx[X[idx, f] <= thr])
        recurse(idx[X[idx, f] > thr])

    recurse(np.arange(len(y)))
    return pred


class TestTrainForest:
    def test_separable_threshold_data_high_accuracy(self):
        pairs = make_separable_pairs(1000, rng_seed=1)
        model = train_forest(pairs, ForestConfig(n_trees=30, rng_seed=0))
        X = np.array([p.features.as_tuple() for p in pairs])
        y = np.array([p.label for p in pairs])
        acc = float(np.mean((predict_probabilities(model, X) >= 0.5) == y))
        assert acc >= 0.99

    def test_deterministic_serialization(self):
        pairs = make_separable_pairs(200, rng_seed=2)
        a = train_forest(pairs, ForestConfig(n_trees=10, rng_seed=7))
        b = train_forest(pairs, ForestConfig(n_trees=10, rng_seed=7))
        assert dumps_model(a) == dumps_model(b)

    def test_different_seed_changes_model(self):
        pairs = make_separable_pairs(200, rng_seed=2)
        a = train_forest(pairs, ForestConfig(n_trees=10, rng_seed=7))
        b = train_forest(pairs, ForestConfig(n_trees=10, rng_seed=8))
        assert dumps_model(a) != dumps_model(b)

    def test_single_class_error(self):
        pairs = [TrainingPair(fv_from([1.0] * FEATURE_COUNT), True) for _ in range(10)]
        with pytest.raises(TrainingDataError):
            train_forest(pairs, ForestConfig(n_trees=2))

    def test_too_few_pairs_error(self):
        with pytest.raises(TrainingDataError):
            train_forest([TrainingPair(fv_from([0.0] * 14), True)], ForestConfig())

    def test_config_validation(self):
        with pytest.raises(TrainingDataError):
            ForestConfig(n_trees=0)
        with pytest.raises(TrainingDataError):
            ForestConfig(features_per_split=0)


class TestPredict:
    def test_single_leaf_tree_returns_fraction(self):
        tree = _Tree(feature=[-1], threshold=[0.0], left=[-1], right=[-1], value=[0.7])
        model = RandomForestModel(trees=[tree], config=ForestConfig(n_trees=1),
                                  feature_count=14)
        assert predict_probability(model, fv_from([0.0] * 14)) == 0.7

    def test_wrong_width_rejected(self):
        tree = _Tree(feature=[-1], threshold=[0.0], left=[-1], right=[-1], value=[0.5])
        model = RandomForestModel(trees=[tree], config=ForestConfig(n_trees=1),
                                  feature_count=14)
        with pytest.raises(ValueError):
            predict_probability(model, [0.0, 1.0])

    def test_deep_positive_point_confident(self):
        pairs = make_separable_pairs(800, rng_seed=3)
        model = train_forest(pairs, ForestConfig(n_trees=40, rng_seed=1))
        deep_pos = [5.0, 50.0, 500.0, 12.0, 6.0, 6.0, 12.0, 1.0,
                    0.9, 0.1, 0.5, 0.5, 1.0, 1.0 / 12.0]
        assert predict_probability(model, fv_from(deep_pos)) >= 0.9
        deep_neg = [5.0, 50.0, 500.0, 12.0, 0.0, 0.0, 0.0, 0.0,
                    0.1, 0.9, 0.0, 0.0, 0.0, 0.0]
        assert predict_probability(model, fv_from(deep_neg)) <= 0.1

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6))
    def test_probability_bounds(self, seed):
        rng = random.Random(seed)
        pairs = make_separable_pairs(60, rng_seed=seed)
        model = train_forest(pairs, ForestConfig(n_trees=5, rng_seed=seed))
        x = [rng.uniform(-10, 1000) for _ in range(FEATURE_COUNT)]
        assert 0.0 <= predict_probability(model, fv_from(x)) <= 1.0

    def test_batch_prediction_matches_single(self):
        pairs = make_separable_pairs(300, rng_seed=4)
        model = train_forest(pairs, ForestConfig(n_trees=15, rng_seed=2))
        X = np.array([p.features.as_tuple() for p in pairs[:50]])
        batch = predict_probabilities(model, X)
        singles = [predict_probability(model, p.features) for p in pairs[:50]]
        assert np.allclose(batch, singles)


class TestSingleTreeOracle:
    def test_matches_exhaustive_partition_oracle(self):
        # <= 20 samples, all features considered, min_leaf 1, no bootstrap:
        # training predictions must match the brute-force partitioner exactly
        for seed in range(10):
            rng = random.Random(seed)
            n = rng.randint(5, 20)
            X = np.array([[rng.randint(0, 4) for _ in range(4)] for _ in range(n)],
                         dtype=float)
            y = np.array([rng.randint(0, 1) for _ in range(n)], dtype=float)
            if len(set(y)) < 2:
                y[0] = 1.0 - y[0]
            config = ForestConfig(n_trees=1, min_leaf=1, features_per_split=4,
                                  rng_seed=seed, bootstrap=False)
            model = train_forest_arrays(X, y, config)
            mine = predict_probabilities(model, X)
            oracle = oracle_tree_predictions(X, y, min_leaf=1)
            assert np.array_equal(mine, oracle)

    def test_oracle_handles_conflicting_duplicates(self):
        # identical rows with different labels end in a fractional leaf
        X = np.array([[1.0, 2.0], [1.0, 2.0], [3.0, 1.0], [1.0, 2.0]])
        y = np.array([1.0, 0.0, 1.0, 1.0])
        config = ForestConfig(n_trees=1, min_leaf=1, features_per_split=2,
                              rng_seed=0, bootstrap=False)
        model = train_forest_arrays(X, y, config)
        mine = predict_probabilities(model, X)
        oracle = oracle_tree_predictions(X, y, min_leaf=1)
        assert np.array_equal(mine, oracle)
        assert mine[0] == pytest.approx(2.0 / 3.0)


class TestSerialization:
    def test_round_trip_predicts_identically(self, tmp_path):
        pairs = make_separable_pairs(300, rng_seed=5)
        model = train_forest(pairs, ForestConfig(n_trees=10, rng_seed=3))
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        rng = random.Random(0)
        for _ in range(100):
            x = fv_from([rng.uniform(0, 100) for _ in range(FEATURE_COUNT)])
            assert predict_probability(loaded, x) == predict_probability(model, x)

    def test_unknown_version_rejected(self):
        payload = json.dumps({"version": 99, "config": {}, "trees": [],
                              "feature_count": 14})
        with pytest.raises(ModelFormatError, match="version"):
            loads_model(payload)

    def test_truncated_file_rejected(self, tmp_path):
        pairs = make_separable_pairs(100, rng_seed=6)
        model = train_forest(pairs, ForestConfig(n_trees=3, rng_seed=0))
        text = dumps_model(model)
        with pytest.raises(ModelFormatError):
            loads_model(text[: len(text) // 2])

    def test_missing_field_rejected(self):
        with pytest.raises(ModelFormatError):
            loads_model(json.dumps({"version": 1, "config": {}}))


class TestCrossValidation:
    def test_cv_f1_on_separable_data(self):
        from storytrack.experiments import kfold_indices

        pairs = make_separable_pairs(1000, rng_seed=9)
        X = np.array([p.features.as_tuple() for p in pairs])
        y = np.array([1.0 if p.label else 0.0 for p in pairs])
        tp = fp = fn = 0
        for fold in kfold_indices(len(pairs), 10, rng_seed=0):
            mask = np.ones(len(pairs), dtype=bool)
            mask[fold] = False
            model = train_forest_arrays(X[mask], y[mask],
                                        ForestConfig(n_trees=20, rng_seed=1))
            pred = predict_probabilities(model, X[fold]) >= 0.5
            actual = y[fold] >= 0.5
            tp += int(np.sum(pred & actual))
            fp += int(np.sum(pred & ~actual))
            fn += int(np.sum(~pred & actual))
        precision = tp / (tp + fp)
        recall = tp / (tp + fn)
        f1 = 2 * precision * recall / (precision + recall)
        assert f1 >= 0.95


GAZ_PAIRS = [(f"Entity Number{i}", f"WD:{i}", 0.9) for i in range(12)]


def tiny_labeled_corpus(n_rel_articles=6, n_rel_tweets=8, n_neg=80):
    docs = []
    minute = 0
    for i in range(n_rel_articles):
        docs.append(make_doc(f"ra{i}", minute, "article",
                             text=f"Entity Number0 meets Entity Number{i % 4 + 1} again today.",
                             relevant=True))
        minute += 1
    for i in range(n_rel_tweets):
        docs.append(make_doc(f"rt{i}", minute, "tweet",
                             text=f"Entity Number0 update on Entity Number{i % 4 + 1}",
                             relevant=True))
        minute += 1
    for i in range(n_neg):
        docs.append(make_doc(f"n{i}", minute, "article" if i % 3 else "tweet",
                             text=f"Entity Number{8 + i % 4} holds talks elsewhere now.",
                             relevant=False))
        minute += 1
    return CorpusStream(docs)


class TestGenerateTrainingPairs:
    def test_pair_count_is_specs_times_docset(self):
        corpus = tiny_labeled_corpus()
        gaz = GazetteerLinker.from_pairs(GAZ_PAIRS)
        specs = [StoryRepSpec(1, 1), StoryRepSpec(2, 4), StoryRepSpec(3, 5)]
        pairs = generate_training_pairs(corpus, specs, neg_ratio=2, rng_seed=0, linker=gaz)
        # doc set: 6 relevant articles + min(8, 2*6)=8 tweets + 2x14 negatives
        doc_set = 6 + 8 + 2 * 14
        assert len(pairs) == len(specs) * doc_set

    def test_deterministic(self):
        corpus = tiny_labeled_corpus()
        gaz = GazetteerLinker.from_pairs(GAZ_PAIRS)
        specs = [StoryRepSpec(1, 2)]
        a = generate_training_pairs(corpus, specs, 2, 5, gaz)
        b = generate_training_pairs(corpus, specs, 2, 5, gaz)
        assert [(p.features, p.label) for p in a] == [(p.features, p.label) for p in b]

    def test_insufficient_spec_error_names_spec(self):
        corpus = tiny_labeled_corpus(n_rel_tweets=2)
        gaz = GazetteerLinker.from_pairs(GAZ_PAIRS)
        with pytest.raises(TrainingDataError, match="5 tweets"):
            generate_training_pairs(corpus, [StoryRepSpec(1, 5)], 2, 0, gaz)

    def test_empty_specs_rejected(self):
        corpus = tiny_labeled_corpus()
        gaz = GazetteerLinker.from_pairs(GAZ_PAIRS)
        with pytest.raises(TrainingDataError):
            generate_training_pairs(corpus, [], 2, 0, gaz)

    def test_default_specs_match_published_sizes(self):
        assert len(DEFAULT_STORY_SPECS) == 15
        assert DEFAULT_STORY_SPECS[0] == StoryRepSpec(1, 1)
        assert DEFAULT_STORY_SPECS[-1] == StoryRepSpec(100, 400)


class TestPairsCsv:
    def test_round_trip(self, tmp_path):
        from storytrack.features import feature_csv_header, feature_csv_row

        pairs = make_separable_pairs(20, rng_seed=11)
        path = tmp_path / "pairs.csv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(feature_csv_header() + "\n")
            for p in pairs:
                fh.write(feature_csv_row(p.features, p.label) + "\n")
        loaded = load_pairs_csv(path)
        assert [(p.features, p.label) for p in loaded] == [
            (p.features, p.label) for p in pairs
        ]

    def test_missing_header(self, tmp_path):
        path = tmp_path / "pairs.csv"
        path.write_text("1,2,3\n", encoding="utf-8")
        with pytest.raises(TrainingDataError):
            load_pairs_csv(path)
