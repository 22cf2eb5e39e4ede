import statistics

from storytrack.corpus import save_jsonl
from storytrack.entitylink import GazetteerLinker, annotate_document
from storytrack.features import IdfSource, extract_features
from storytrack.relevance import build_story_representation
from storytrack.synth import (
    SyntheticSpec,
    gen_synthetic,
    gen_weight_decided_corpus,
    relabel_for_story,
    save_gazetteer,
)


def small_spec(**kw):
    defaults = dict(n_stories=2, docs_per_story=40, entities_per_story=12,
                    noise_docs=80, overlap_fraction=0.0, rng_seed=5)
    defaults.update(kw)
    return SyntheticSpec(**defaults)


class TestGenSynthetic:
    def test_deterministic_byte_identical(self, tmp_path):
        a = gen_synthetic(small_spec())
        b = gen_synthetic(small_spec())
        pa, pb = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        save_jsonl(a.stream, pa)
        save_jsonl(b.stream, pb)
        assert pa.read_bytes() == pb.read_bytes()
        ga, gb = tmp_path / "a.tsv", tmp_path / "b.tsv"
        save_gazetteer(a.gazetteer, ga)
        save_gazetteer(b.gazetteer, gb)
        assert ga.read_bytes() == gb.read_bytes()

    def test_different_seed_differs(self):
        a = gen_synthetic(small_spec())
        b = gen_synthetic(small_spec(rng_seed=6))
        assert [d.id for d in a.stream] != [d.id for d in b.stream] or (
            [d.text for d in a.stream] != [d.text for d in b.stream])

    def test_zero_overlap_disjoint_pools(self):
        built = gen_synthetic(small_spec(overlap_fraction=0.0))
        assert not (set(built.story_entities[0]) & set(built.story_entities[1]))

    def test_half_overlap_shares_half_the_pool(self):
        built = gen_synthetic(small_spec(overlap_fraction=0.5))
        shared = set(built.story_entities[0]) & set(built.story_entities[1])
        assert len(shared) == round(0.5 * 12)

    def test_target_story_labels(self):
        built = gen_synthetic(small_spec(target_story=1))
        for d in built.stream:
            assert d.relevant == (d.story_label == "story1")

    def test_relabel_for_story(self):
        built = gen_synthetic(small_spec())
        relabeled = relabel_for_story(built.stream, "story1")
        assert all(d.relevant == (d.story_label == "story1") for d in relabeled)
        assert len(relabeled) == len(built.stream)

    def test_counts(self):
        built = gen_synthetic(small_spec())
        assert len(built.stream) == 2 * 40 + 80
        labels = [d.story_label for d in built.stream]
        assert labels.count("story0") == 40
        assert labels.count(None) == 80

    def test_gazetteer_resolves_story_entities(self):
        built = gen_synthetic(small_spec())
        gaz = GazetteerLinker.from_pairs(built.gazetteer)
        story_docs = [d for d in built.stream if d.story_label == "story0"][:10]
        kb_hits = 0
        for doc in story_docs:
            ann = annotate_document(doc, gaz)
            kb_hits += sum(a.entity_id.startswith("WD:") for a in ann.annotations)
        assert kb_hits >= 10

    def test_tweets_within_length_bound(self):
        built = gen_synthetic(small_spec())
        for d in built.stream:
            if d.source == "tweet":
                assert len(d.text) <= 560

    def test_timestamps_strictly_increasing(self):
        built = gen_synthetic(small_spec())
        times = [d.timestamp for d in built.stream]
        assert all(a < b for a, b in zip(times, times[1:]))


class TestWeightDecidedCorpus:
    def test_centrals_carry_weight_peripherals_do_not(self):
        wdc = gen_weight_decided_corpus(n_relevant=40, n_irrelevant=80, rng_seed=1)
        gaz = GazetteerLinker.from_pairs(wdc.gazetteer)
        idf = IdfSource()
        for d in wdc.seed_docs:
            idf.observe(d.text)
        seeds = [annotate_document(d, gaz) for d in wdc.seed_docs]
        story = build_story_representation(seeds, ["noise text"], idf)
        central_ids = {f"WD:{9000 + i}" for i in range(len(wdc.central))}
        peripheral_ids = {
            f"WD:{9000 + len(wdc.central) + i}" for i in range(len(wdc.peripheral))
        }
        assert central_ids <= story.story_entity_set
        assert peripheral_ids <= story.story_entity_set
        assert all(story.graph.node_weight(c) > 0.01 for c in central_ids)
        assert all(story.graph.node_weight(p) == 0.0 for p in peripheral_ids)

    def test_overlap_counts_matched_but_weights_separate(self):
        wdc = gen_weight_decided_corpus(n_relevant=60, n_irrelevant=60, rng_seed=2)
        gaz = GazetteerLinker.from_pairs(wdc.gazetteer)
        idf = IdfSource()
        for d in list(wdc.seed_docs) + [d for d in wdc.stream]:
            idf.observe(d.text)
        seeds = [annotate_document(d, gaz) for d in wdc.seed_docs]
        story = build_story_representation(seeds, ["noise text"], idf)
        rel_overlap, irr_overlap, rel_weight, irr_weight = [], [], [], []
        for d in wdc.stream:
            fv = extract_features(story, annotate_document(d, gaz))
            (rel_overlap if d.relevant else irr_overlap).append(fv.total_overlap)
            (rel_weight if d.relevant else irr_weight).append(fv.total_weight)
        # overlap counts cannot separate the classes
        assert abs(statistics.mean(rel_overlap) - statistics.mean(irr_overlap)) < 0.4
        # graph weights separate them cleanly
        assert min(rel_weight) > max(irr_weight)

    def test_labels_and_sources(self):
        wdc = gen_weight_decided_corpus(n_relevant=10, n_irrelevant=20, rng_seed=3)
        rel = [d for d in wdc.stream if d.relevant]
        irr = [d for d in wdc.stream if not d.relevant]
        assert len(rel) == 10 and len(irr) == 20
        assert all(d.relevant for d in wdc.seed_docs)
