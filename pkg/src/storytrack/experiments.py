"""Experiment drivers: feature-group ablation, SSS strategy benchmark, and
the uniform multi-system comparison harness."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .baselines import (
    CollectionStats,
    KMeansBaseline,
    L2RBaselineFeaturizer,
    TextBaseline,
    BOW,
    BOW_PLUS_ENTITIES,
)
from .corpus import CorpusStream, chronological_split, sample_negatives
from .entitylink import Linker, annotate_document
from .features import IdfSource
from .metrics import EvalReport, score
from .relevance import (
    ForestConfig,
    RandomForestModel,
    StoryRepSpec,
    TrainingPair,
    build_story_representation,
    predict_probabilities,
    train_forest_arrays,
)
from .tracker import Strategy, TrackerConfig, init_story, run_stream

# 1-based feature indices kept per ablation group.
FEATURE_GROUPS: dict[str, tuple[int, ...]] = {
    "story_doc_alone": (1, 2, 3, 4),
    "story_doc_tfidf": (1, 2, 3, 4, 9, 10),
    "text_based": tuple(range(1, 11)),
    "graph_based": (1, 2, 3, 4, 9, 10, 11, 12, 13, 14),
    "all": tuple(range(1, 15)),
}


def mask_feature_columns(X: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Zero out every feature column not in the (1-based) keep set."""
    out = np.zeros_like(X)
    for idx in keep:
        out[:, idx - 1] = X[:, idx - 1]
    return out


def kfold_indices(n: int, k: int, rng_seed: int) -> list[np.ndarray]:
    order = list(range(n))
    random.Random(rng_seed).shuffle(order)
    return [np.array(order[i::k], dtype=np.intp) for i in range(k)]


@dataclass
class AblationRow:
    group: str
    kept_features: tuple[int, ...]
    report: EvalReport
    runtime: float  # total cross-validation wall time, seconds


def run_ablation(
    pairs: Sequence[TrainingPair],
    groups: Optional[dict[str, tuple[int, ...]]] = None,
    forest_config: Optional[ForestConfig] = None,
    n_folds: int = 10,
    rng_seed: int = 0,
) -> list[AblationRow]:
    """Cross-validated precision/recall/F1 per feature group.

    Group columns outside the group are masked to zero so every run sees
    the same vector width.
    """
    groups = groups or FEATURE_GROUPS
    config = forest_config or ForestConfig(n_trees=30, rng_seed=rng_seed)
    X = np.array([p.features.as_tuple() for p in pairs], dtype=np.float64)
    y = np.array([1.0 if p.label else 0.0 for p in pairs])
    folds = kfold_indices(len(pairs), n_folds, rng_seed)
    rows = []
    for name, keep in groups.items():
        Xg = mask_feature_columns(X, keep)
        t0 = time.perf_counter()
        tp = fp = fn = tn = 0
        for i, test_idx in enumerate(folds):
            train_mask = np.ones(len(pairs), dtype=bool)
            train_mask[test_idx] = False
            model = train_forest_arrays(Xg[train_mask], y[train_mask], config)
            pred = predict_probabilities(model, Xg[test_idx]) >= 0.5
            actual = y[test_idx] >= 0.5
            tp += int(np.sum(pred & actual))
            fp += int(np.sum(pred & ~actual))
            fn += int(np.sum(~pred & actual))
            tn += int(np.sum(~pred & ~actual))
        elapsed = time.perf_counter() - t0
        rows.append(AblationRow(
            group=name, kept_features=tuple(keep),
            report=EvalReport.from_counts(tp, fp, fn, tn),
            runtime=elapsed,
        ))
    return rows


@dataclass
class SssBenchRow:
    strategy: str
    initial_nodes: int
    initial_edges: int
    final_nodes: int
    final_edges: int
    report: EvalReport
    wall_time: float
    mean_latency: float


def bench_sss(
    corpus: CorpusStream,
    strategies: Sequence[Strategy],
    model: RandomForestModel,
    linker: Linker,
    seed_articles: int = 1,
    seed_tweets: int = 0,
    neg_ratio: int = 10,
    rng_seed: int = 0,
    recent_pool_size: int = 500,
) -> list[SssBenchRow]:
    """Run each strategy over the same stream with the same model; report
    graph growth, accuracy and wall time."""
    rows = []
    for strategy in strategies:
        seed_pos, rest = chronological_split(corpus, seed_articles, seed_tweets)
        seed_neg = sample_negatives(corpus, seed_pos, neg_ratio, rng_seed)
        config = TrackerConfig(strategy=strategy, recent_pool_size=recent_pool_size)
        state = init_story(seed_pos, seed_neg, linker, model, config=config)
        n0, e0 = state.story.graph.n_nodes, state.story.graph.n_edges
        t0 = time.perf_counter()
        result = run_stream(state, rest, model, linker)
        wall = time.perf_counter() - t0
        truth = {d.id: bool(d.relevant) for d in rest}
        report = score(result.decisions, truth,
                       runtime_per_doc=result.timing.mean_latency)
        rows.append(SssBenchRow(
            strategy=strategy.value,
            initial_nodes=n0, initial_edges=e0,
            final_nodes=state.story.graph.n_nodes,
            final_edges=state.story.graph.n_edges,
            report=report, wall_time=wall,
            mean_latency=result.timing.mean_latency,
        ))
    return rows


@dataclass
class SystemRow:
    system: str
    report: EvalReport
    wall_time: float
    decisions: list = None  # (doc_id, probability, relevant) triples


def write_classify_log(decisions, path) -> None:
    """Write (doc_id, probability, relevant) triples in the tracker's
    decision-log JSONL schema, so every system shares one log format."""
    import json

    with open(path, "w", encoding="utf-8") as fh:
        for doc_id, p, relevant in decisions:
            fh.write(json.dumps({
                "doc_id": doc_id, "p": float(p), "relevant": bool(relevant),
                "cycle": 0, "latency_us": 0.0,
            }, sort_keys=True) + "\n")


def _run_text_system(name, baseline, seed_pos, seed_neg, stream, annotated, truth):
    t0 = time.perf_counter()
    baseline.train(seed_pos, seed_neg)
    decisions = []
    for doc in stream:
        target = annotated[doc.id] if annotated is not None else doc
        p = baseline.classify_proba(target)
        decisions.append((doc.id, p, p >= 0.5))
    wall = time.perf_counter() - t0
    return SystemRow(
        system=name,
        report=score([(d, r) for d, _, r in decisions], truth),
        wall_time=wall,
        decisions=decisions,
    )


def train_l2r_baseline(
    corpus: CorpusStream,
    specs: Sequence[StoryRepSpec],
    neg_ratio: int,
    rng_seed: int,
    linker: Linker,
    config: Optional[ForestConfig] = None,
) -> tuple[RandomForestModel, CollectionStats]:
    """Train the IR-similarity L2R baseline on simulated story-doc pairs
    (3 features: tf-idf cosine, BM25, query likelihood)."""
    rng = random.Random(rng_seed)
    stats = CollectionStats()
    stats.observe_all(d.text for d in corpus)
    idf = IdfSource()
    idf.observe_all(d.text for d in corpus)
    rel_articles = [d for d in corpus if d.relevant and d.source == "article"]
    rel_tweets = [d for d in corpus if d.relevant and d.source == "tweet"]
    negatives = [d for d in corpus if d.relevant is False]
    pos = rel_articles + rng.sample(
        rel_tweets, min(len(rel_tweets), 2 * len(rel_articles)))
    neg = rng.sample(negatives, min(len(negatives), neg_ratio * len(pos)))
    doc_set = sorted(pos + neg, key=lambda d: d.sort_key())

    rows, labels = [], []
    annotated_cache: dict[str, object] = {}

    def annotate(d):
        if d.id not in annotated_cache:
            annotated_cache[d.id] = annotate_document(d, linker)
        return annotated_cache[d.id]

    for spec in specs:
        if len(rel_articles) < spec.n_articles or len(rel_tweets) < spec.n_tweets:
            continue
        story_docs = rng.sample(rel_articles, spec.n_articles) + rng.sample(
            rel_tweets, spec.n_tweets)
        neg_seed = rng.sample(negatives, min(len(negatives), neg_ratio * len(story_docs)))
        story = build_story_representation(
            [annotate(d) for d in story_docs], neg_seed, idf)
        featurizer = L2RBaselineFeaturizer(story, stats)
        for d in doc_set:
            rows.append(featurizer.features(d))
            labels.append(1.0 if d.relevant else 0.0)
    config = config or ForestConfig(n_trees=50, features_per_split=2, rng_seed=rng_seed)
    model = train_forest_arrays(np.array(rows), np.array(labels), config)
    return model, stats


def compare_systems(
    corpus: CorpusStream,
    sd_model: RandomForestModel,
    linker: Linker,
    seed_articles: int = 2,
    seed_tweets: int = 2,
    neg_ratio: int = 10,
    rng_seed: int = 0,
    l2r_model: Optional[RandomForestModel] = None,
    l2r_stats: Optional[CollectionStats] = None,
    kmeans_k: Optional[int] = None,
) -> list[SystemRow]:
    """Uniform harness over the comparison systems: Text, Text+SSL,
    Text+Entity, S-KMeans, L2R, SD and SD+SSS(AR) on one labeled stream."""
    seed_pos, rest = chronological_split(corpus, seed_articles, seed_tweets)
    seed_neg = sample_negatives(corpus, seed_pos, neg_ratio, rng_seed)
    truth = {d.id: bool(d.relevant) for d in rest}
    annotated = {d.id: annotate_document(d, linker) for d in rest}
    annotated_seed_pos = [annotate_document(d, linker) for d in seed_pos]
    annotated_seed_neg = [annotate_document(d, linker) for d in seed_neg]

    rows = [
        _run_text_system("Text", TextBaseline(BOW), seed_pos, seed_neg,
                         rest, None, truth),
        _run_text_system("Text+SSL", TextBaseline(BOW, ssl=True), seed_pos,
                         seed_neg, rest, None, truth),
        _run_text_system("Text+Entity", TextBaseline(BOW_PLUS_ENTITIES),
                         annotated_seed_pos, annotated_seed_neg, rest,
                         annotated, truth),
    ]

    t0 = time.perf_counter()
    km = KMeansBaseline(k=kmeans_k, rng_seed=rng_seed)
    km.train(seed_pos, seed_neg)
    km.fit_stream(list(rest))
    km_decisions = [(d.id, 1.0 if km.classify(d) else 0.0, km.classify(d))
                    for d in rest]
    rows.append(SystemRow("S-KMeans",
                          score([(d, r) for d, _, r in km_decisions], truth),
                          time.perf_counter() - t0, decisions=km_decisions))

    if l2r_model is not None and l2r_stats is not None:
        t0 = time.perf_counter()
        idf = IdfSource()
        idf.observe_all(d.text for d in corpus)
        story = build_story_representation(annotated_seed_pos, seed_neg, idf)
        featurizer = L2RBaselineFeaturizer(story, l2r_stats)
        decisions = []
        for d in rest:
            p = float(predict_probabilities(
                l2r_model, np.array([featurizer.features(d)]))[0])
            decisions.append((d.id, p, p >= 0.5))
        rows.append(SystemRow("L2R",
                              score([(d, r) for d, _, r in decisions], truth),
                              time.perf_counter() - t0, decisions=decisions))

    for name, strategy in (("SD", Strategy.NONE), ("SD+SSS", Strategy.ACCUMULATE_REVISIT)):
        t0 = time.perf_counter()
        state = init_story(seed_pos, seed_neg, linker, sd_model,
                           config=TrackerConfig(strategy=strategy))
        result = run_stream(state, rest, sd_model, linker)
        rows.append(SystemRow(
            name,
            score(result.decisions, truth, runtime_per_doc=result.timing.mean_latency),
            time.perf_counter() - t0,
            decisions=[(d.doc_id, d.probability, d.relevant)
                       for d in result.decisions],
        ))
    return rows
