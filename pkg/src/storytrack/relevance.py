"""Pointwise relevance model: a from-scratch random forest over the
14-feature story-document vectors, plus the training-pair generator."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, asdict
from typing import Optional, Sequence

import numpy as np

from .corpus import ARTICLE, TWEET, CorpusStream
from .entitylink import AnnotatedDocument, Linker, annotate_document
from .features import (
    FEATURE_COUNT,
    FeatureVector,
    IdfSource,
    StoryRepresentation,
    build_tfidf_profile,
    extract_features,
)
from .storygraph import EntityGraph, GraphConfig

MODEL_FORMAT_VERSION = 1


class TrainingDataError(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class TrainingPair:
    features: FeatureVector
    label: bool


@dataclass(frozen=True)
class StoryRepSpec:
    """Size of one simulated story representation used for training."""

    n_articles: int
    n_tweets: int

    def __post_init__(self):
        if self.n_articles + self.n_tweets < 1:
            raise TrainingDataError("a story spec needs at least one document")


# Story-representation sizes used to simulate distinct training stories.
DEFAULT_STORY_SPECS = tuple(
    StoryRepSpec(a, t)
    for a, t in [
        (1, 1), (1, 2), (2, 4), (2, 6), (3, 2), (3, 5), (4, 4), (5, 20),
        (10, 40), (20, 80), (30, 25), (40, 100), (50, 150), (50, 200),
        (100, 400),
    ]
)


@dataclass
class ForestConfig:
    n_trees: int = 100
    min_leaf: int = 2
    max_depth: Optional[int] = None
    features_per_split: int = 3
    rng_seed: int = 0
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise TrainingDataError("n_trees must be >= 1")
        if self.features_per_split < 1:
            raise TrainingDataError("features_per_split must be >= 1")


@dataclass
class _Tree:
    """Flat binary tree: feature[i] < 0 marks a leaf with value[i] the
    positive fraction; internal nodes route value <= threshold to left."""

    feature: list[int]
    threshold: list[float]
    left: list[int]
    right: list[int]
    value: list[float]


@dataclass
class RandomForestModel:
    trees: list[_Tree]
    config: ForestConfig
    feature_count: int = FEATURE_COUNT


def _best_split(X, y, idx, candidates, min_leaf):
    """Lowest-Gini split over the candidate features.

    Candidates are scanned in ascending order and thresholds in ascending
    order, so ties resolve to the smallest (feature, threshold).
    """
    n = idx.size
    ysub = y[idx]
    total_pos = ysub.sum()
    best = None
    for f in candidates:
        v = X[idx, f]
        order = np.argsort(v, kind="mergesort")
        sv = v[order]
        sy = ysub[order]
        cuts = np.nonzero(sv[:-1] < sv[1:])[0]
        if cuts.size == 0:
            continue
        n_left = cuts + 1.0
        valid = (n_left >= min_leaf) & (n - n_left >= min_leaf)
        cuts = cuts[valid]
        if cuts.size == 0:
            continue
        n_left = cuts + 1.0
        pos_left = np.cumsum(sy)[cuts]
        n_right = n - n_left
        pos_right = total_pos - pos_left
        p_l = pos_left / n_left
        p_r = pos_right / n_right
        gini = (
            n_left * (1.0 - p_l * p_l - (1.0 - p_l) * (1.0 - p_l))
            + n_right * (1.0 - p_r * p_r - (1.0 - p_r) * (1.0 - p_r))
        ) / n
        k = int(np.argmin(gini))
        if best is None or gini[k] < best[0]:
            thr = float((sv[cuts[k]] + sv[cuts[k] + 1]) / 2.0)
            best = (float(gini[k]), int(f), thr)
    return best


def _grow_tree(X, y, sample_idx, config: ForestConfig, rng) -> _Tree:
    n_features = X.shape[1]
    fps = min(config.features_per_split, n_features)
    tree = _Tree([], [], [], [], [])

    def new_node():
        tree.feature.append(-1)
        tree.threshold.append(0.0)
        tree.left.append(-1)
        tree.right.append(-1)
        tree.value.append(0.0)
        return len(tree.feature) - 1

    root = new_node()
    stack = [(root, sample_idx, 0)]
    while stack:
        node, idx, depth = stack.pop()
        ysub = y[idx]
        pos_frac = float(ysub.mean())
        tree.value[node] = pos_frac
        if (
            pos_frac in (0.0, 1.0)
            or idx.size < 2 * config.min_leaf
            or (config.max_depth is not None and depth >= config.max_depth)
        ):
            continue
        candidates = np.sort(rng.choice(n_features, size=fps, replace=False))
        split = _best_split(X, y, idx, candidates, config.min_leaf)
        if split is None:
            continue
        _, feat, thr = split
        mask = X[idx, feat] <= thr
        left_idx = idx[mask]
        right_idx = idx[~mask]
        tree.feature[node] = feat
        tree.threshold[node] = thr
        left = new_node()
        right = new_node()
        tree.left[node] = left
        tree.right[node] = right
        stack.append((right, right_idx, depth + 1))
        stack.append((left, left_idx, depth + 1))
    return tree


def train_forest_arrays(X: np.ndarray, y: np.ndarray, config: ForestConfig) -> RandomForestModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise TrainingDataError("X must be (n, d) with one label per row")
    if X.shape[0] < 2 or len(np.unique(y)) < 2:
        raise TrainingDataError("training data must contain both classes")
    n = X.shape[0]
    trees = []
    for t in range(config.n_trees):
        rng = np.random.default_rng([config.rng_seed, t])
        if config.bootstrap:
            sample_idx = rng.integers(0, n, size=n)
        else:
            sample_idx = np.arange(n)
        trees.append(_grow_tree(X, y, sample_idx, config, rng))
    return RandomForestModel(trees=trees, config=config, feature_count=X.shape[1])


def train_forest(pairs: Sequence[TrainingPair], config: ForestConfig) -> RandomForestModel:
    if len(pairs) < 2:
        raise TrainingDataError("need at least 2 training pairs")
    X = np.array([p.features.as_tuple() for p in pairs], dtype=np.float64)
    y = np.array([1.0 if p.label else 0.0 for p in pairs])
    return train_forest_arrays(X, y, config)


def _tree_predict_one(tree: _Tree, x) -> float:
    node = 0
    while tree.feature[node] >= 0:
        if x[tree.feature[node]] <= tree.threshold[node]:
            node = tree.left[node]
        else:
            node = tree.right[node]
    return tree.value[node]


def predict_probability(model: RandomForestModel, fv) -> float:
    """Mean leaf positive-fraction over the forest's trees."""
    x = fv.as_tuple() if isinstance(fv, FeatureVector) else tuple(fv)
    if len(x) != model.feature_count:
        raise ValueError(f"expected {model.feature_count} features, got {len(x)}")
    return sum(_tree_predict_one(t, x) for t in model.trees) / len(model.trees)


def predict_probabilities(model: RandomForestModel, X) -> np.ndarray:
    """Vectorized batch prediction."""
    X = np.asarray(X, dtype=np.float64)
    out = np.zeros(X.shape[0])
    for tree in model.trees:
        feature = np.asarray(tree.feature)
        threshold = np.asarray(tree.threshold)
        left = np.asarray(tree.left)
        right = np.asarray(tree.right)
        value = np.asarray(tree.value)
        nodes = np.zeros(X.shape[0], dtype=np.intp)
        active = feature[nodes] >= 0
        while np.any(active):
            cur = nodes[active]
            go_left = X[active, feature[cur]] <= threshold[cur]
            nodes[active] = np.where(go_left, left[cur], right[cur])
            active = feature[nodes] >= 0
        out += value[nodes]
    return out / len(model.trees)


def dumps_model(model: RandomForestModel) -> str:
    payload = {
        "version": MODEL_FORMAT_VERSION,
        "feature_count": model.feature_count,
        "config": asdict(model.config),
        "trees": [asdict(t) for t in model.trees],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def save_model(model: RandomForestModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))


def loads_model(data: str) -> RandomForestModel:
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"malformed model file: {exc}") from None
    if not isinstance(payload, dict) or payload.get("version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model version {payload.get('version')!r}"
            if isinstance(payload, dict) else "malformed model file"
        )
    try:
        config = ForestConfig(**payload["config"])
        trees = [_Tree(**t) for t in payload["trees"]]
        feature_count = int(payload["feature_count"])
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"malformed model file: {exc}") from None
    return RandomForestModel(trees=trees, config=config, feature_count=feature_count)


def load_model(path) -> RandomForestModel:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_model(fh.read())


def _sample_or_fail(rng, pool, k, what):
    if len(pool) < k:
        raise TrainingDataError(f"{what}: need {k} documents, corpus has {len(pool)}")
    return rng.sample(pool, k)


def generate_training_pairs(
    labeled_corpus: CorpusStream,
    specs: Sequence[StoryRepSpec],
    neg_ratio: int,
    rng_seed: int,
    linker: Linker,
    tweets_per_article: int = 2,
    graph_config: Optional[GraphConfig] = None,
) -> list[TrainingPair]:
    """Simulate one training story per spec and pair it against a fixed
    labeled document set.

    The document set is all relevant articles, a sample of relevant tweets
    (tweets_per_article x the article count) and neg_ratio x as many
    negatives; it is drawn once and reused across specs, so the total is
    |specs| x |document set| pairs. Deterministic under rng_seed.
    """
    if not specs:
        raise TrainingDataError("no story specs given")
    rng = random.Random(rng_seed)
    rel_articles = [d for d in labeled_corpus if d.relevant and d.source == ARTICLE]
    rel_tweets = [d for d in labeled_corpus if d.relevant and d.source == TWEET]
    negatives = [d for d in labeled_corpus if d.relevant is False]

    n_tweet_sample = min(len(rel_tweets), tweets_per_article * len(rel_articles))
    doc_positives = rel_articles + rng.sample(rel_tweets, n_tweet_sample)
    doc_negatives = _sample_or_fail(
        rng, negatives, neg_ratio * len(doc_positives), "document-set negatives"
    )
    doc_set = sorted(doc_positives + doc_negatives, key=lambda d: d.sort_key())

    idf = IdfSource()
    idf.observe_all(d.text for d in labeled_corpus)

    annotated: dict[str, AnnotatedDocument] = {}

    def annotate(doc):
        if doc.id not in annotated:
            annotated[doc.id] = annotate_document(doc, linker)
        return annotated[doc.id]

    annotated_doc_set = [annotate(d) for d in doc_set]

    pairs: list[TrainingPair] = []
    for spec in specs:
        label = f"story spec {spec.n_articles} articles x {spec.n_tweets} tweets"
        story_articles = _sample_or_fail(rng, rel_articles, spec.n_articles, label)
        story_tweets = _sample_or_fail(rng, rel_tweets, spec.n_tweets, label)
        story_annotated = [annotate(d) for d in story_articles + story_tweets]
        neg_seed = _sample_or_fail(
            rng, negatives, neg_ratio * len(story_annotated), label + " negatives"
        )
        story = build_story_representation(
            story_annotated, neg_seed, idf, graph_config=graph_config
        )
        for ann in annotated_doc_set:
            pairs.append(
                TrainingPair(features=extract_features(story, ann), label=bool(ann.doc.relevant))
            )
    return pairs


def build_story_representation(
    seed_annotated: Sequence[AnnotatedDocument],
    neg_docs,
    idf: IdfSource,
    graph_config: Optional[GraphConfig] = None,
) -> StoryRepresentation:
    """Graph + profiles for a story defined by already-annotated seeds."""
    graph = EntityGraph(graph_config)
    story_docs: dict[str, AnnotatedDocument] = {}
    for ann in seed_annotated:
        story_docs[ann.doc.id] = ann
        graph.add_document(ann)
    graph.initialize_bias()
    graph.pagerank()
    story = StoryRepresentation(
        story_docs=story_docs,
        graph=graph,
        relevant_profile=build_tfidf_profile(story_docs.values(), idf),
        irrelevant_profile=build_tfidf_profile(neg_docs, idf),
        story_entity_set=set(),
        seed_docs=tuple(seed_annotated),
        idf=idf,
    )
    story.rebuild_entity_set()
    return story


def load_pairs_csv(path) -> list[TrainingPair]:
    """Read feature rows (14 feature columns + label) exported offline."""
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if "label" not in header:
            raise TrainingDataError(f"{path}: missing header with label column")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != FEATURE_COUNT + 1:
                raise TrainingDataError(
                    f"{path}:{lineno}: expected {FEATURE_COUNT + 1} columns"
                )
            fv = FeatureVector.from_sequence([float(c) for c in cells[:-1]])
            pairs.append(TrainingPair(features=fv, label=cells[-1].strip() in ("1", "true", "True")))
    return pairs
