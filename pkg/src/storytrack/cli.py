"""Command-line interface.

Subcommands: link, train, track, eval, bench-sss, ablate, complexity,
gen-synthetic. Every subcommand accepts --config <toml-or-json> whose keys
provide defaults (flat keys, or a section named after the subcommand);
explicit flags win. Reports go to stdout as aligned tables and optionally
to CSV via --out.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .corpus import CorpusStream, chronological_split, load_jsonl, sample_negatives, save_jsonl
from .entitylink import (
    GazetteerLinker,
    RemoteTagmeLinker,
    SyntheticLinker,
    annotate_document,
    annotate_tweets,
)
from .experiments import bench_sss, run_ablation
from .features import feature_csv_header, feature_csv_row
from .metrics import normalize_reports, score, story_complexity
from .relevance import (
    DEFAULT_STORY_SPECS,
    ForestConfig,
    StoryRepSpec,
    generate_training_pairs,
    load_model,
    load_pairs_csv,
    save_model,
    train_forest,
)
from .synth import SyntheticSpec, gen_synthetic, save_gazetteer
from .tracker import (
    Strategy,
    TrackerConfig,
    export_state,
    init_story,
    run_stream,
    write_decision_log,
)


def _load_config_file(path: str) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".toml"):
        try:
            import tomllib  # py311+
        except ModuleNotFoundError:
            import tomli as tomllib
        return tomllib.loads(text)
    return json.loads(text)


COMMANDS = ("gen-synthetic", "link", "train", "track", "eval", "bench-sss",
            "ablate", "complexity")


def _config_defaults(argv: list[str]) -> dict:
    path = None
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif arg.startswith("--config="):
            path = arg.split("=", 1)[1]
    if path is None:
        return {}
    cfg = _load_config_file(path)
    command = next((a for a in argv if a in COMMANDS), None)
    flat = {k.replace("-", "_"): v for k, v in cfg.items() if not isinstance(v, dict)}
    if command and command in cfg and isinstance(cfg[command], dict):
        flat.update({k.replace("-", "_"): v for k, v in cfg[command].items()})
    return flat


def _table(headers: list[str], rows: list[list]) -> str:
    cells = [[str(c) for c in row] for row in rows]
    widths = [
        max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
        for i, h in enumerate(headers)
    ]
    def fmt(row):
        return "  ".join(c.ljust(w) for c, w in zip(row, widths))
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(r) for r in cells)
    return "\n".join(lines)


def _write_csv(path: str, headers: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(headers)
        writer.writerows(rows)


def _build_linker(args):
    if getattr(args, "gazetteer", None):
        return GazetteerLinker.from_tsv(args.gazetteer)
    if getattr(args, "remote", False):
        return RemoteTagmeLinker.from_env()
    return SyntheticLinker()


def _parse_specs(text: str) -> list[StoryRepSpec]:
    specs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        a, t = part.lower().split("x")
        specs.append(StoryRepSpec(int(a), int(t)))
    if not specs:
        raise ValueError("no story specs parsed")
    return specs


def _add_linker_flags(p):
    p.add_argument("--gazetteer", help="gazetteer TSV for offline linking")
    p.add_argument("--remote", action="store_true",
                   help="use the remote wikification API (env-configured)")


def _add_seed_flags(p, cfg):
    p.add_argument("--seed-docs", type=int, default=cfg.get("seed_docs"),
                   help="seed with this many relevant articles AND tweets each")
    p.add_argument("--seed-articles", type=int, default=cfg.get("seed_articles"))
    p.add_argument("--seed-tweets", type=int, default=cfg.get("seed_tweets"))
    p.add_argument("--neg-ratio", type=int, default=cfg.get("neg_ratio", 10))


def _resolve_seeds(args) -> tuple[int, int]:
    both = args.seed_docs
    articles = args.seed_articles
    tweets = args.seed_tweets
    if articles is None:
        articles = both if both is not None else 1
    if tweets is None:
        tweets = both if both is not None else 1
    return articles, tweets


def cmd_gen_synthetic(args) -> int:
    spec = SyntheticSpec(
        n_stories=args.n_stories,
        docs_per_story=args.docs_per_story,
        entities_per_story=args.entities_per_story,
        noise_docs=args.noise_docs,
        overlap_fraction=args.overlap_fraction,
        rng_seed=args.rng_seed,
        target_story=args.target_story,
    )
    built = gen_synthetic(spec)
    save_jsonl(built.stream, args.out)
    save_gazetteer(built.gazetteer, args.gazetteer_out)
    print(f"wrote {len(built.stream)} documents to {args.out}")
    print(f"wrote {len(built.gazetteer)} gazetteer entries to {args.gazetteer_out}")
    return 0


def cmd_link(args) -> int:
    stream = load_jsonl(args.corpus)
    linker = _build_linker(args)
    annotated = []
    if args.group_tweets:
        tweets = [d for d in stream if d.source == corpus_mod.TWEET]
        others = [d for d in stream if d.source != corpus_mod.TWEET]
        by_id = {a.doc.id: a for a in annotate_tweets(tweets, linker)}
        for d in others:
            by_id[d.id] = annotate_document(d, linker)
        annotated = [by_id[d.id] for d in stream]
    else:
        annotated = [annotate_document(d, linker) for d in stream]
    with open(args.out, "w", encoding="utf-8") as fh:
        for ann in annotated:
            obj = corpus_mod.document_to_dict(ann.doc)
            obj["annotations"] = [
                {"entity_id": a.entity_id, "position": a.position,
                 "confidence": a.confidence}
                for a in ann.annotations
            ]
            fh.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"annotated {len(annotated)} documents -> {args.out}")
    return 0


def cmd_train(args) -> int:
    config = ForestConfig(
        n_trees=args.n_trees,
        min_leaf=args.min_leaf,
        max_depth=args.max_depth,
        features_per_split=args.features_per_split,
        rng_seed=args.rng_seed,
    )
    if args.from_pairs_csv:
        pairs = load_pairs_csv(args.from_pairs_csv)
    else:
        stream = load_jsonl(args.corpus)
        linker = _build_linker(args)
        specs = _parse_specs(args.specs) if args.specs else list(DEFAULT_STORY_SPECS)
        pairs = generate_training_pairs(
            stream, specs, args.neg_ratio, args.rng_seed, linker)
    if args.pairs_csv:
        with open(args.pairs_csv, "w", encoding="utf-8") as fh:
            fh.write(feature_csv_header() + "\n")
            for p in pairs:
                fh.write(feature_csv_row(p.features, p.label) + "\n")
        print(f"wrote {len(pairs)} feature rows to {args.pairs_csv}")
    model = train_forest(pairs, config)
    save_model(model, args.out)
    print(f"trained forest ({config.n_trees} trees) on {len(pairs)} pairs -> {args.out}")
    return 0


def cmd_track(args) -> int:
    stream = load_jsonl(args.corpus)
    linker = _build_linker(args)
    model = load_model(args.model)
    seed_articles, seed_tweets = _resolve_seeds(args)
    seed_pos, rest = chronological_split(stream, seed_articles, seed_tweets)
    seed_neg = sample_negatives(stream, seed_pos, args.neg_ratio, args.rng_seed)
    config = TrackerConfig(
        strategy=Strategy.parse(args.strategy),
        recent_pool_size=args.recent_k,
        sss_add_policy=args.sss_add_policy,
    )
    state = init_story(seed_pos, seed_neg, linker, model, config=config)
    result = run_stream(state, rest, model, linker)
    write_decision_log(result.decisions, args.out)
    if args.state_out:
        Path(args.state_out).write_text(
            json.dumps(export_state(state), indent=2, sort_keys=True),
            encoding="utf-8",
        )
    print(f"tracked {len(result.decisions)} documents "
          f"({len(result.relevant_ids)} relevant), "
          f"mean latency {result.timing.mean_latency * 1e3:.3f} ms -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    stream = load_jsonl(args.corpus)
    truth = {d.id: bool(d.relevant) for d in stream if d.relevant is not None}
    decisions = []
    with open(args.decisions, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                decisions.append((obj["doc_id"], bool(obj["relevant"])))
    report = score(decisions, truth)
    headers = ["precision", "recall", "f1", "tp", "fp", "fn", "tn"]
    row = [f"{report.precision:.4f}", f"{report.recall:.4f}", f"{report.f1:.4f}",
           report.tp, report.fp, report.fn, report.tn]
    print(_table(headers, [row]))
    if args.out:
        _write_csv(args.out, headers, [row])
    return 0


def cmd_bench_sss(args) -> int:
    stream = load_jsonl(args.corpus)
    linker = _build_linker(args)
    model = load_model(args.model)
    strategies = [Strategy.parse(s.strip()) for s in args.strategies.split(",") if s.strip()]
    seed_articles, seed_tweets = _resolve_seeds(args)
    rows = bench_sss(
        stream, strategies, model, linker,
        seed_articles=seed_articles, seed_tweets=seed_tweets,
        neg_ratio=args.neg_ratio, rng_seed=args.rng_seed,
        recent_pool_size=args.recent_k,
    )
    headers = ["strategy", "N", "E", "N'", "E'", "precision", "recall", "f1", "time_s"]
    table_rows = [
        [r.strategy, r.initial_nodes, r.initial_edges, r.final_nodes, r.final_edges,
         f"{r.report.precision:.4f}", f"{r.report.recall:.4f}",
         f"{r.report.f1:.4f}", f"{r.wall_time:.2f}"]
        for r in rows
    ]
    print(_table(headers, table_rows))
    if args.out:
        _write_csv(args.out, headers, table_rows)
    return 0


def cmd_ablate(args) -> int:
    if args.from_pairs_csv:
        pairs = load_pairs_csv(args.from_pairs_csv)
    else:
        stream = load_jsonl(args.corpus)
        linker = _build_linker(args)
        specs = _parse_specs(args.specs) if args.specs else list(DEFAULT_STORY_SPECS)
        pairs = generate_training_pairs(
            stream, specs, args.neg_ratio, args.rng_seed, linker)
    rows = run_ablation(
        pairs,
        forest_config=ForestConfig(n_trees=args.n_trees, rng_seed=args.rng_seed),
        n_folds=args.n_folds,
        rng_seed=args.rng_seed,
    )
    headers = ["group", "features", "precision", "recall", "f1", "runtime_s"]
    table_rows = [
        [r.group, ",".join(map(str, r.kept_features)),
         f"{r.report.precision:.4f}", f"{r.report.recall:.4f}",
         f"{r.report.f1:.4f}", f"{r.runtime:.2f}"]
        for r in rows
    ]
    print(_table(headers, table_rows))
    if args.out:
        _write_csv(args.out, headers, table_rows)
    return 0


def cmd_complexity(args) -> int:
    stream = load_jsonl(args.corpus)
    linker = _build_linker(args)
    labels = (
        [s.strip() for s in args.stories.split(",") if s.strip()]
        if args.stories
        else sorted({d.story_label for d in stream if d.story_label})
    )
    if not labels:
        raise ValueError("no story labels present in the corpus")
    reports = []
    for label in labels:
        relabeled = CorpusStream(
            corpus_mod.Document(
                id=d.id, timestamp=d.timestamp, source=d.source, text=d.text,
                hashtags=list(d.hashtags), story_label=d.story_label,
                relevant=d.story_label == label,
            )
            for d in stream
        )
        seed, rest = chronological_split(relabeled, args.seed_articles, args.seed_tweets)
        seed_ann = [annotate_document(d, linker) for d in seed]
        stream_ann = [annotate_document(d, linker) for d in rest]
        reports.append(story_complexity(seed_ann, stream_ann, label=label))
    reports = normalize_reports(reports)
    headers = ["story", "entity_similarity", "stream_entropy_bits",
               "norm_similarity", "norm_entropy", "complexity"]
    rows = [
        [r.label, f"{r.entity_similarity:.4f}", f"{r.stream_entropy:.4f}",
         f"{r.normalized_similarity:.4f}", f"{r.normalized_entropy:.4f}",
         f"{r.normalized_product:.4f}"]
        for r in reports
    ]
    print(_table(headers, rows))
    if args.out:
        _write_csv(args.out, headers, rows)
    return 0


def build_parser(cfg: dict) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storytrack",
        description="Track evolving news stories across mixed article/tweet streams.",
    )
    parser.add_argument("--config", help="TOML or JSON file with default values")
    subparsers = parser.add_subparsers(dest="command", required=True)

    class _Sub:
        # every subcommand also accepts --config (handled by the pre-scan)
        def add_parser(self, name, **kw):
            p = subparsers.add_parser(name, **kw)
            p.add_argument("--config", help=argparse.SUPPRESS)
            return p

    sub = _Sub()

    p = sub.add_parser("gen-synthetic", help="generate a labeled synthetic corpus")
    p.add_argument("--out", default=cfg.get("out", "corpus.jsonl"))
    p.add_argument("--gazetteer-out", default=cfg.get("gazetteer_out", "gazetteer.tsv"))
    p.add_argument("--n-stories", type=int, default=cfg.get("n_stories", 3))
    p.add_argument("--docs-per-story", type=int, default=cfg.get("docs_per_story", 300))
    p.add_argument("--entities-per-story", type=int,
                   default=cfg.get("entities_per_story", 30))
    p.add_argument("--noise-docs", type=int, default=cfg.get("noise_docs", 1000))
    p.add_argument("--overlap-fraction", type=float,
                   default=cfg.get("overlap_fraction", 0.0))
    p.add_argument("--rng-seed", type=int, default=cfg.get("rng_seed", 0))
    p.add_argument("--target-story", type=int, default=cfg.get("target_story", 0))
    p.set_defaults(func=cmd_gen_synthetic)

    p = sub.add_parser("link", help="annotate a corpus with entity ids")
    p.add_argument("--corpus", required="corpus" not in cfg,
                   default=cfg.get("corpus"))
    _add_linker_flags(p)
    p.add_argument("--group-tweets", action="store_true",
                   help="disambiguate hashtag-grouped tweets together")
    p.add_argument("--out", default=cfg.get("out", "annotated.jsonl"))
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("train", help="train the relevance forest")
    p.add_argument("--corpus", default=cfg.get("corpus"))
    _add_linker_flags(p)
    p.add_argument("--specs", default=cfg.get("specs"),
                   help="story sizes like '1x1,2x4,5x20' (articles x tweets)")
    p.add_argument("--neg-ratio", type=int, default=cfg.get("neg_ratio", 10))
    p.add_argument("--rng-seed", type=int, default=cfg.get("rng_seed", 0))
    p.add_argument("--n-trees", type=int, default=cfg.get("n_trees", 100))
    p.add_argument("--min-leaf", type=int, default=cfg.get("min_leaf", 2))
    p.add_argument("--max-depth", type=int, default=cfg.get("max_depth"))
    p.add_argument("--features-per-split", type=int,
                   default=cfg.get("features_per_split", 3))
    p.add_argument("--pairs-csv", default=cfg.get("pairs_csv"),
                   help="also export the generated feature rows")
    p.add_argument("--from-pairs-csv", default=cfg.get("from_pairs_csv"),
                   help="train from previously exported feature rows")
    p.add_argument("--out", default=cfg.get("out", "model.json"))
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("track", help="run the tracking loop over a stream")
    p.add_argument("--corpus", required="corpus" not in cfg, default=cfg.get("corpus"))
    _add_linker_flags(p)
    p.add_argument("--model", required="model" not in cfg, default=cfg.get("model"))
    _add_seed_flags(p, cfg)
    p.add_argument("--strategy", default=cfg.get("strategy", "None"),
                   help="None | Acc | Rev | RR | AR")
    p.add_argument("--recent-k", type=int, default=cfg.get("recent_k", 500))
    p.add_argument("--sss-add-policy", default=cfg.get("sss_add_policy", "single_top"),
                   choices=["single_top", "all_above_threshold"])
    p.add_argument("--rng-seed", type=int, default=cfg.get("rng_seed", 0))
    p.add_argument("--out", default=cfg.get("out", "decisions.jsonl"))
    p.add_argument("--state-out", default=cfg.get("state_out"))
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", help="score a decision log against labels")
    p.add_argument("--decisions", required="decisions" not in cfg,
                   default=cfg.get("decisions"))
    p.add_argument("--corpus", required="corpus" not in cfg, default=cfg.get("corpus"))
    p.add_argument("--out", default=cfg.get("out"))
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench-sss", help="compare selection strategies")
    p.add_argument("--corpus", required="corpus" not in cfg, default=cfg.get("corpus"))
    _add_linker_flags(p)
    p.add_argument("--model", required="model" not in cfg, default=cfg.get("model"))
    _add_seed_flags(p, cfg)
    p.add_argument("--strategies", default=cfg.get("strategies", "None,Acc,Rev,RR,AR"))
    p.add_argument("--recent-k", type=int, default=cfg.get("recent_k", 500))
    p.add_argument("--rng-seed", type=int, default=cfg.get("rng_seed", 0))
    p.add_argument("--out", default=cfg.get("out"))
    p.set_defaults(func=cmd_bench_sss)

    p = sub.add_parser("ablate", help="feature-group ablation via cross-validation")
    p.add_argument("--corpus", default=cfg.get("corpus"))
    _add_linker_flags(p)
    p.add_argument("--specs", default=cfg.get("specs"))
    p.add_argument("--neg-ratio", type=int, default=cfg.get("neg_ratio", 10))
    p.add_argument("--n-folds", type=int, default=cfg.get("n_folds", 10))
    p.add_argument("--n-trees", type=int, default=cfg.get("n_trees", 30))
    p.add_argument("--rng-seed", type=int, default=cfg.get("rng_seed", 0))
    p.add_argument("--from-pairs-csv", default=cfg.get("from_pairs_csv"))
    p.add_argument("--out", default=cfg.get("out"))
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("complexity", help="story complexity per labeled story")
    p.add_argument("--corpus", required="corpus" not in cfg, default=cfg.get("corpus"))
    _add_linker_flags(p)
    p.add_argument("--stories", default=cfg.get("stories"),
                   help="comma-separated story labels (default: all)")
    p.add_argument("--seed-articles", type=int, default=cfg.get("seed_articles", 1))
    p.add_argument("--seed-tweets", type=int, default=cfg.get("seed_tweets", 1))
    p.add_argument("--out", default=cfg.get("out"))
    p.set_defaults(func=cmd_complexity)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = _config_defaults(argv)
        parser = build_parser(cfg)
        args = parser.parse_args(argv)
        return args.func(args)
    except BrokenPipeError:
        return 1
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"storytrack: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
