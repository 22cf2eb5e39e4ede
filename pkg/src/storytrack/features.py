"""tf-idf profiles and the 14-feature story-document relevance vector."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence

from .corpus import TITLE_CHAR_LIMIT, Document
from .entitylink import AnnotatedDocument
from .storygraph import EntityGraph

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

FEATURE_NAMES = (
    "story_doc_count",
    "story_node_count",
    "doc_char_count",
    "doc_entity_count",
    "title_overlap",
    "body_overlap",
    "total_overlap",
    "avg_overlap",
    "cos_relevant",
    "cos_irrelevant",
    "title_weight",
    "body_weight",
    "total_weight",
    "avg_weight",
)

FEATURE_COUNT = len(FEATURE_NAMES)


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens of length >= 2."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= 2]


class IdfSource:
    """Running document-frequency counter over every observed document."""

    def __init__(self):
        self.n_docs = 0
        self.df: Counter = Counter()

    def observe(self, text: str) -> None:
        self.n_docs += 1
        self.df.update(set(tokenize(text)))

    def observe_all(self, texts: Iterable[str]) -> None:
        for t in texts:
            self.observe(t)

    def idf(self, term: str) -> float:
        return math.log((self.n_docs + 1) / (self.df[term] + 1)) + 1.0


class TfIdfProfile:
    """Sparse tf-idf vector with a cached norm."""

    def __init__(self, weights: Optional[Dict[str, float]] = None):
        self.weights: Dict[str, float] = weights or {}
        self.norm = math.sqrt(sum(w * w for w in self.weights.values()))

    def cosine(self, other: "TfIdfProfile") -> float:
        if self.norm == 0.0 or other.norm == 0.0:
            return 0.0
        small, big = self.weights, other.weights
        if len(small) > len(big):
            small, big = big, small
        dot = sum(w * big.get(t, 0.0) for t, w in small.items())
        return dot / (self.norm * other.norm)


def _doc_text(doc) -> str:
    if isinstance(doc, str):
        return doc
    if isinstance(doc, AnnotatedDocument):
        return doc.doc.text
    if isinstance(doc, Document):
        return doc.text
    raise TypeError(f"cannot take text from {type(doc).__name__}")


def build_tfidf_profile(docs: Iterable, idf: IdfSource) -> TfIdfProfile:
    """tf over the concatenated docs, weighted by the idf source."""
    tf: Counter = Counter()
    for doc in docs:
        tf.update(tokenize(_doc_text(doc)))
    return TfIdfProfile({term: count * idf.idf(term) for term, count in tf.items()})


@dataclass
class StoryRepresentation:
    """Evolving story state: docs, entity graph, aggregated text profiles."""

    story_docs: dict[str, AnnotatedDocument]
    graph: EntityGraph
    relevant_profile: TfIdfProfile
    irrelevant_profile: TfIdfProfile
    story_entity_set: set[str]
    seed_docs: tuple[AnnotatedDocument, ...]
    idf: IdfSource = field(default_factory=IdfSource)

    def rebuild_entity_set(self) -> None:
        self.story_entity_set = {
            a.entity_id for d in self.story_docs.values() for a in d.annotations
        }

    def rebuild_relevant_profile(self) -> None:
        self.relevant_profile = build_tfidf_profile(self.story_docs.values(), self.idf)


@dataclass
class FeatureVector:
    """The 14 relevance features of a story-document pair.

    Counts (1-8 positions) are stored as floats; total_overlap and
    total_weight are the title+body sums, avg_* divide by the entity count
    with a zero guard.
    """

    story_doc_count: float
    story_node_count: float
    doc_char_count: float
    doc_entity_count: float
    title_overlap: float
    body_overlap: float
    total_overlap: float
    avg_overlap: float
    cos_relevant: float
    cos_irrelevant: float
    title_weight: float
    body_weight: float
    total_weight: float
    avg_weight: float

    def as_tuple(self) -> tuple[float, ...]:
        return (
            self.story_doc_count, self.story_node_count, self.doc_char_count,
            self.doc_entity_count, self.title_overlap, self.body_overlap,
            self.total_overlap, self.avg_overlap, self.cos_relevant,
            self.cos_irrelevant, self.title_weight, self.body_weight,
            self.total_weight, self.avg_weight,
        )

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "FeatureVector":
        if len(values) != FEATURE_COUNT:
            raise ValueError(f"expected {FEATURE_COUNT} features, got {len(values)}")
        return cls(*[float(v) for v in values])


def extract_features(story: StoryRepresentation, doc: AnnotatedDocument) -> FeatureVector:
    """Compute all 14 features for one story-document pair.

    Entity overlaps count annotation occurrences (multiplicity included),
    split at the 140-char title/body boundary; weight features sum the
    story graph's node weights over the same matching annotations.
    """
    n_entities = len(doc.annotations)
    title_overlap = body_overlap = 0
    title_weight = body_weight = 0.0
    for ann in doc.annotations:
        if ann.entity_id not in story.story_entity_set:
            continue
        weight = story.graph.node_weight(ann.entity_id)
        if ann.position < TITLE_CHAR_LIMIT:
            title_overlap += 1
            title_weight += weight
        else:
            body_overlap += 1
            body_weight += weight
    total_overlap = title_overlap + body_overlap
    total_weight = title_weight + body_weight
    doc_profile = build_tfidf_profile([doc], story.idf)
    return FeatureVector(
        story_doc_count=float(len(story.story_docs)),
        story_node_count=float(story.graph.n_nodes),
        doc_char_count=float(len(doc.doc.text)),
        doc_entity_count=float(n_entities),
        title_overlap=float(title_overlap),
        body_overlap=float(body_overlap),
        total_overlap=float(total_overlap),
        avg_overlap=total_overlap / n_entities if n_entities else 0.0,
        cos_relevant=story.relevant_profile.cosine(doc_profile),
        cos_irrelevant=story.irrelevant_profile.cosine(doc_profile),
        title_weight=title_weight,
        body_weight=body_weight,
        total_weight=total_weight,
        avg_weight=total_weight / n_entities if n_entities else 0.0,
    )


def feature_csv_header(label: bool = True) -> str:
    cols = list(FEATURE_NAMES)
    if label:
        cols.append("label")
    return ",".join(cols)


def feature_csv_row(fv: FeatureVector, label: Optional[bool] = None) -> str:
    cells = [repr(v) for v in fv.as_tuple()]
    if label is not None:
        cells.append("1" if label else "0")
    return ",".join(cells)
