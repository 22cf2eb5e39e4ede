"""End-to-end story tracking loop and semi-supervised selection strategies.

A tracker classifies each stream document against the current story
representation; every 50 new relevant documents a selection cycle may
promote confident documents into the story docs and refresh the graph.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .corpus import CorpusStream, Document
from .entitylink import AnnotatedDocument, Linker, annotate_document
from .features import IdfSource, StoryRepresentation, extract_features
from .relevance import (
    RandomForestModel,
    build_story_representation,
    predict_probability,
)
from .storygraph import GraphConfig

RELEVANCE_THRESHOLD = 0.5
PROMOTE_THRESHOLD = 0.8
TRIGGER_BATCH = 50
REVISIT_EVERY = 10
DEFAULT_RECENT_POOL = 500

SINGLE_TOP = "single_top"
ALL_ABOVE_THRESHOLD = "all_above_threshold"


class TrackerError(RuntimeError):
    pass


class Strategy(Enum):
    NONE = "None"
    ACCUMULATE = "Acc"
    REVISIT = "Rev"
    REVISIT_RECENT = "RR"
    ACCUMULATE_REVISIT = "AR"

    @classmethod
    def parse(cls, name: str) -> "Strategy":
        for member in cls:
            if name in (member.value, member.name):
                return member
        raise TrackerError(f"unknown strategy {name!r}")


@dataclass
class TrackerConfig:
    strategy: Strategy = Strategy.NONE
    trigger_batch: int = TRIGGER_BATCH
    promote_threshold: float = PROMOTE_THRESHOLD
    revisit_every: int = REVISIT_EVERY
    recent_pool_size: int = DEFAULT_RECENT_POOL
    sss_add_policy: str = SINGLE_TOP
    graph_config: GraphConfig = field(default_factory=GraphConfig)


@dataclass
class TrackDecision:
    doc_id: str
    probability: float
    relevant: bool
    latency: float  # seconds: annotate + featurize + predict
    annotate_latency: float = 0.0  # seconds inside the linker (separable for remote runs)
    sss_cycle: int = 0


@dataclass
class _Classified:
    ann: AnnotatedDocument
    probability: float
    relevant: bool
    arrival: int


@dataclass
class TrackerState:
    story: StoryRepresentation
    config: TrackerConfig
    relevant: list[_Classified] = field(default_factory=list)
    irrelevant: list[_Classified] = field(default_factory=list)
    sss_cycle: int = 0
    story_doc_snapshot: set[str] = field(default_factory=set)
    pending_relevant_count: int = 0
    seed_ids: set[str] = field(default_factory=set)
    _arrivals: int = 0

    def processed_in_arrival_order(self) -> list[_Classified]:
        return sorted(self.relevant + self.irrelevant, key=lambda r: r.arrival)


@dataclass
class TimingReport:
    doc_count: int
    mean_latency: float
    p95_latency: float
    total_time: float
    mean_annotate_latency: float = 0.0


def init_story(
    seed_pos: Sequence[Document],
    seed_neg: Sequence[Document],
    linker: Linker,
    model: Optional[RandomForestModel] = None,
    config: Optional[TrackerConfig] = None,
) -> TrackerState:
    """Annotate the seeds, build the story graph (bias frozen to its top
    entities) and the relevant/irrelevant profiles."""
    del model  # the pre-trained model is only consulted per document
    if not seed_pos:
        raise TrackerError("cannot initialize a story from an empty seed")
    config = config or TrackerConfig()
    idf = IdfSource()
    idf.observe_all(d.text for d in seed_pos)
    idf.observe_all(d.text for d in seed_neg)
    seed_annotated = [
        annotate_document(d, linker, available=False) for d in seed_pos
    ]
    story = build_story_representation(
        seed_annotated, list(seed_neg), idf, graph_config=config.graph_config
    )
    state = TrackerState(story=story, config=config)
    state.story_doc_snapshot = set(story.story_docs)
    state.seed_ids = set(story.story_docs)
    return state


def process_document(
    state: TrackerState,
    doc: Document,
    model: RandomForestModel,
    linker: Linker,
) -> TrackDecision:
    """Classify one stream document and run a selection cycle when due."""
    t0 = time.perf_counter()
    ann = annotate_document(doc, linker, available=True)
    t_annotated = time.perf_counter()
    fv = extract_features(state.story, ann)
    p = predict_probability(model, fv)
    latency = time.perf_counter() - t0
    annotate_latency = t_annotated - t0

    relevant = p >= RELEVANCE_THRESHOLD
    record = _Classified(ann=ann, probability=p, relevant=relevant, arrival=state._arrivals)
    state._arrivals += 1
    (state.relevant if relevant else state.irrelevant).append(record)
    state.story.idf.observe(doc.text)

    if relevant:
        state.pending_relevant_count += 1
    if (
        state.config.strategy is not Strategy.NONE
        and state.pending_relevant_count >= state.config.trigger_batch
    ):
        _run_cycle(state, model)
        state.pending_relevant_count = 0
    return TrackDecision(
        doc_id=doc.id, probability=p, relevant=relevant, latency=latency,
        annotate_latency=annotate_latency, sss_cycle=state.sss_cycle,
    )


def _run_cycle(state: TrackerState, model: RandomForestModel) -> None:
    strategy = state.config.strategy
    if strategy is Strategy.ACCUMULATE:
        accumulate_cycle(state)
    elif strategy is Strategy.REVISIT:
        revisit_cycle(state, model)
    elif strategy is Strategy.REVISIT_RECENT:
        revisit_recent_cycle(state, model, state.config.recent_pool_size)
    elif strategy is Strategy.ACCUMULATE_REVISIT:
        if state.sss_cycle % state.config.revisit_every != 0:
            accumulate_cycle(state)
        if state.sss_cycle % state.config.revisit_every == 0:
            revisit_cycle(state, model)


def _promotion_key(record: _Classified):
    # highest probability first; ties to the earliest, then smallest id
    return (-record.probability, record.ann.doc.timestamp, record.ann.doc.id)


def _promote(state: TrackerState, records: list[_Classified]) -> bool:
    """Add promoted docs to the story and its graph; True if any added."""
    added = False
    for record in records:
        doc_id = record.ann.doc.id
        if doc_id in state.story.story_docs:
            continue
        state.story.story_docs[doc_id] = record.ann
        state.story.graph.add_document(record.ann)
        added = True
    return added


def _refresh_story(state: TrackerState) -> None:
    state.story.graph.pagerank()
    state.story.rebuild_entity_set()
    state.story.rebuild_relevant_profile()


def accumulate_cycle(state: TrackerState) -> None:
    """Promote the most confident of the latest relevant batch (p >= 0.8).

    With sss_add_policy=all_above_threshold every confident document in the
    batch is promoted instead of just the top one.
    """
    batch = state.relevant[-state.config.trigger_batch:]
    candidates = [
        r for r in batch
        if r.probability >= state.config.promote_threshold
        and r.ann.doc.id not in state.story.story_docs
    ]
    chosen: list[_Classified] = []
    if candidates:
        if state.config.sss_add_policy == ALL_ABOVE_THRESHOLD:
            chosen = candidates
        else:
            chosen = [min(candidates, key=_promotion_key)]
    if _promote(state, chosen):
        _refresh_story(state)
    state.sss_cycle += 1


def _reset_to_snapshot(state: TrackerState) -> None:
    """Drop story docs added since the last revisit (seeds always stay)."""
    keep = state.story_doc_snapshot | state.seed_ids
    for doc_id in [d for d in state.story.story_docs if d not in keep]:
        ann = state.story.story_docs.pop(doc_id)
        state.story.graph.remove_document(ann)


def _rescore_and_reassign(
    state: TrackerState, model: RandomForestModel, pool: list[_Classified]
) -> None:
    for record in pool:
        fv = extract_features(state.story, record.ann)
        record.probability = predict_probability(model, fv)
        record.relevant = record.probability >= RELEVANCE_THRESHOLD
    merged = state.processed_in_arrival_order()
    state.relevant = [r for r in merged if r.relevant]
    state.irrelevant = [r for r in merged if not r.relevant]


def _revisit(state, model, pool: list[_Classified], mark_unavailable: bool) -> None:
    _rescore_and_reassign(state, model, pool)
    _reset_to_snapshot(state)
    candidates = [
        r for r in pool
        if r.probability >= state.config.promote_threshold
        and r.ann.doc.id not in state.story.story_docs
    ]
    if candidates:
        _promote(state, [min(candidates, key=_promotion_key)])
    _refresh_story(state)
    if mark_unavailable:
        for record in pool:
            record.ann.available = False
    state.story_doc_snapshot = set(state.story.story_docs)
    state.sss_cycle += 1


def revisit_cycle(state: TrackerState, model: RandomForestModel) -> None:
    """Re-classify past documents against the current story, reset the
    story docs to the last revisit snapshot and append the single most
    confident document (p >= 0.8).

    Under Accumulate+Revisit only Available documents are re-scored and
    they become Unavailable afterwards. Under the plain Revisit strategy
    every classified document is re-scored every cycle (nothing is marked),
    which is what makes that strategy accurate but slow on long streams.
    """
    if state.config.strategy is Strategy.REVISIT:
        pool = state.processed_in_arrival_order()
        _revisit(state, model, pool, mark_unavailable=False)
    else:
        pool = [r for r in state.processed_in_arrival_order() if r.ann.available]
        _revisit(state, model, pool, mark_unavailable=True)


def revisit_recent_cycle(state: TrackerState, model: RandomForestModel, k: int) -> None:
    """Revisit restricted to the k most recent classified documents
    (regardless of availability); older documents keep their assignment."""
    pool = state.processed_in_arrival_order()[-k:] if k > 0 else []
    _revisit(state, model, pool, mark_unavailable=True)


@dataclass
class TrackResult:
    decisions: list[TrackDecision]
    relevant_ids: list[str]
    irrelevant_ids: list[str]
    timing: TimingReport


def run_stream(
    state: TrackerState,
    stream: CorpusStream,
    model: RandomForestModel,
    linker: Linker,
) -> TrackResult:
    """Process every stream document in order; classification latency is
    measured per document (selection cycles excluded)."""
    decisions = []
    t0 = time.perf_counter()
    for doc in stream:
        decisions.append(process_document(state, doc, model, linker))
    total = time.perf_counter() - t0
    latencies = sorted(d.latency for d in decisions)
    if latencies:
        mean = sum(latencies) / len(latencies)
        p95 = latencies[min(len(latencies) - 1, int(0.95 * len(latencies)))]
        mean_annotate = sum(d.annotate_latency for d in decisions) / len(decisions)
    else:
        mean = p95 = mean_annotate = 0.0
    return TrackResult(
        decisions=decisions,
        relevant_ids=[r.ann.doc.id for r in state.relevant],
        irrelevant_ids=[r.ann.doc.id for r in state.irrelevant],
        timing=TimingReport(
            doc_count=len(decisions), mean_latency=mean, p95_latency=p95,
            total_time=total, mean_annotate_latency=mean_annotate,
        ),
    )


def write_decision_log(decisions: Sequence[TrackDecision], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in decisions:
            fh.write(json.dumps({
                "doc_id": d.doc_id,
                "p": d.probability,
                "relevant": d.relevant,
                "cycle": d.sss_cycle,
                "latency_us": round(d.latency * 1e6, 3),
            }, sort_keys=True))
            fh.write("\n")


def export_state(state: TrackerState) -> dict:
    return {
        "graph": state.story.graph.snapshot(),
        "story_doc_ids": sorted(state.story.story_docs),
        "sss_cycle": state.sss_cycle,
        "relevant_count": len(state.relevant),
        "irrelevant_count": len(state.irrelevant),
    }
