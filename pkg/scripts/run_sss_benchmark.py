#!/usr/bin/env python3
"""Benchmark the five selection strategies (None/Acc/Rev/RR/AR) on one
synthetic story stream and print the graph-growth / accuracy / wall-time
table."""

import argparse

from storytrack.entitylink import GazetteerLinker
from storytrack.experiments import bench_sss
from storytrack.relevance import ForestConfig, StoryRepSpec, generate_training_pairs, train_forest
from storytrack.synth import SyntheticSpec, gen_synthetic, relabel_for_story
from storytrack.tracker import Strategy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--docs-per-story", type=int, default=2000)
    ap.add_argument("--noise-docs", type=int, default=8000)
    ap.add_argument("--strategies", default="None,Acc,Rev,RR,AR")
    ap.add_argument("--rng-seed", type=int, default=77)
    args = ap.parse_args()

    train_built = gen_synthetic(SyntheticSpec(
        n_stories=1, docs_per_story=600, entities_per_story=30,
        noise_docs=2400, overlap_fraction=0.0, rng_seed=args.rng_seed + 1))
    train_gaz = GazetteerLinker.from_pairs(train_built.gazetteer)
    specs = [StoryRepSpec(a, t) for a, t in
             [(1, 1), (1, 2), (2, 4), (2, 6), (3, 2), (3, 5), (4, 4), (5, 20)]]
    pairs = generate_training_pairs(
        relabel_for_story(train_built.stream, "story0"), specs,
        neg_ratio=10, rng_seed=1, linker=train_gaz)
    model = train_forest(pairs, ForestConfig(n_trees=100, rng_seed=3))

    built = gen_synthetic(SyntheticSpec(
        n_stories=1, docs_per_story=args.docs_per_story,
        entities_per_story=30, noise_docs=args.noise_docs,
        overlap_fraction=0.0, rng_seed=args.rng_seed))
    stream = relabel_for_story(built.stream, "story0")
    gaz = GazetteerLinker.from_pairs(built.gazetteer)

    strategies = [Strategy.parse(s) for s in args.strategies.split(",")]
    rows = bench_sss(stream, strategies, model, gaz,
                     seed_articles=1, seed_tweets=0, neg_ratio=10, rng_seed=0)
    header = f"{'SSS':>5}  {'N':>4} {'E':>5}  {'N~':>5} {'E~':>6}  " \
             f"{'P':>6} {'R':>6} {'F1':>6}  {'time(s)':>8}  {'ms/doc':>7}"
    print(header)
    print("-" * len(header))
    for r in rows:
        print(f"{r.strategy:>5}  {r.initial_nodes:>4} {r.initial_edges:>5}  "
              f"{r.final_nodes:>5} {r.final_edges:>6}  "
              f"{r.report.precision:>6.3f} {r.report.recall:>6.3f} "
              f"{r.report.f1:>6.3f}  {r.wall_time:>8.2f}  "
              f"{r.mean_latency * 1e3:>7.3f}")


if __name__ == "__main__":
    main()
