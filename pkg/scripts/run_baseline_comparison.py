#!/usr/bin/env python3
"""Compare all tracking systems (Text, Text+SSL, Text+Entity, S-KMeans, L2R,
SD, SD+SSS) on one synthetic story with a shared seed set."""

import argparse

from storytrack.entitylink import GazetteerLinker
from storytrack.experiments import compare_systems, train_l2r_baseline
from storytrack.relevance import ForestConfig, StoryRepSpec, generate_training_pairs, train_forest
from storytrack.synth import SyntheticSpec, gen_synthetic, relabel_for_story


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--docs-per-story", type=int, default=300)
    ap.add_argument("--noise-docs", type=int, default=2500)
    ap.add_argument("--seed-articles", type=int, default=2)
    ap.add_argument("--seed-tweets", type=int, default=2)
    ap.add_argument("--rng-seed", type=int, default=5)
    args = ap.parse_args()

    built = gen_synthetic(SyntheticSpec(
        n_stories=3, docs_per_story=args.docs_per_story, entities_per_story=30,
        noise_docs=args.noise_docs, overlap_fraction=0.3, rng_seed=args.rng_seed))
    gaz = GazetteerLinker.from_pairs(built.gazetteer)
    train_stream = relabel_for_story(built.stream, "story0")
    specs = [StoryRepSpec(a, t) for a, t in
             [(1, 1), (1, 2), (2, 4), (2, 6), (3, 2), (3, 5), (4, 4), (5, 20)]]
    pairs = generate_training_pairs(train_stream, specs, neg_ratio=10,
                                    rng_seed=1, linker=gaz)
    sd_model = train_forest(pairs, ForestConfig(n_trees=100, rng_seed=3))
    l2r_model, l2r_stats = train_l2r_baseline(
        train_stream, specs, neg_ratio=10, rng_seed=1, linker=gaz)

    rows = compare_systems(
        relabel_for_story(built.stream, "story1"), sd_model, gaz,
        seed_articles=args.seed_articles, seed_tweets=args.seed_tweets,
        neg_ratio=10, rng_seed=0, l2r_model=l2r_model, l2r_stats=l2r_stats)
    print(f"{'system':>12}  {'P':>6} {'R':>6} {'F1':>6}  {'time(s)':>8}")
    print("-" * 46)
    for r in rows:
        print(f"{r.system:>12}  {r.report.precision:>6.3f} "
              f"{r.report.recall:>6.3f} {r.report.f1:>6.3f}  {r.wall_time:>8.2f}")


if __name__ == "__main__":
    main()
