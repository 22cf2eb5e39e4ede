#!/usr/bin/env python3
"""End-to-end demo on synthetic data: generate a 3-story corpus, train the
relevance forest on story0, then track story1 with and without
semi-supervised selection."""

import argparse
import time

from storytrack.corpus import chronological_split, sample_negatives
from storytrack.entitylink import GazetteerLinker
from storytrack.metrics import score
from storytrack.relevance import ForestConfig, StoryRepSpec, generate_training_pairs, train_forest
from storytrack.synth import SyntheticSpec, gen_synthetic, relabel_for_story
from storytrack.tracker import Strategy, TrackerConfig, init_story, run_stream


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--docs-per-story", type=int, default=400)
    ap.add_argument("--noise-docs", type=int, default=3800)
    ap.add_argument("--overlap-fraction", type=float, default=0.3)
    ap.add_argument("--seed-articles", type=int, default=2)
    ap.add_argument("--seed-tweets", type=int, default=1)
    ap.add_argument("--n-trees", type=int, default=100)
    ap.add_argument("--rng-seed", type=int, default=42)
    args = ap.parse_args()

    print("generating corpus ...")
    built = gen_synthetic(SyntheticSpec(
        n_stories=3, docs_per_story=args.docs_per_story,
        entities_per_story=30, noise_docs=args.noise_docs,
        overlap_fraction=args.overlap_fraction, rng_seed=args.rng_seed))
    gaz = GazetteerLinker.from_pairs(built.gazetteer)

    print("training relevance model on story0 ...")
    specs = [StoryRepSpec(a, t) for a, t in
             [(1, 1), (1, 2), (2, 4), (2, 6), (3, 2), (3, 5), (4, 4), (5, 20)]]
    pairs = generate_training_pairs(
        relabel_for_story(built.stream, "story0"), specs,
        neg_ratio=10, rng_seed=1, linker=gaz)
    model = train_forest(pairs, ForestConfig(n_trees=args.n_trees, rng_seed=3))
    print(f"  {len(pairs)} training pairs, {args.n_trees} trees")

    stream = relabel_for_story(built.stream, "story1")
    for strategy in (Strategy.NONE, Strategy.ACCUMULATE_REVISIT):
        seed, rest = chronological_split(stream, args.seed_articles, args.seed_tweets)
        seed_neg = sample_negatives(stream, seed, 10, rng_seed=2)
        state = init_story(seed, seed_neg, gaz, model,
                           config=TrackerConfig(strategy=strategy))
        t0 = time.perf_counter()
        result = run_stream(state, rest, model, gaz)
        wall = time.perf_counter() - t0
        report = score(result.decisions, {d.id: bool(d.relevant) for d in rest})
        print(f"tracking story1 [{strategy.value:>4}] "
              f"P={report.precision:.3f} R={report.recall:.3f} F1={report.f1:.3f} "
              f"wall={wall:.1f}s latency={result.timing.mean_latency * 1e3:.2f}ms/doc "
              f"graph={state.story.graph.n_nodes}N/{state.story.graph.n_edges}E")


if __name__ == "__main__":
    main()
