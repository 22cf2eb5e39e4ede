"""Precision/recall/F1 scoring and the story-complexity measure."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .entitylink import AnnotatedDocument


class MetricsError(ValueError):
    pass


@dataclass
class EvalReport:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int
    runtime_per_doc: Optional[float] = None  # seconds

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int, tn: int,
                    runtime_per_doc: Optional[float] = None) -> "EvalReport":
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall > 0 else 0.0
        )
        return cls(precision, recall, f1, tp, fp, fn, tn, runtime_per_doc)


def _decision_pair(decision):
    if isinstance(decision, tuple):
        return decision[0], bool(decision[1])
    return decision.doc_id, bool(decision.relevant)


def score(decisions: Sequence, truth: Mapping[str, bool],
          runtime_per_doc: Optional[float] = None) -> EvalReport:
    """Binary precision/recall/F1 with relevant as the positive class."""
    tp = fp = fn = tn = 0
    for decision in decisions:
        doc_id, predicted = _decision_pair(decision)
        if doc_id not in truth:
            raise MetricsError(f"no ground-truth label for document {doc_id!r}")
        actual = bool(truth[doc_id])
        if predicted and actual:
            tp += 1
        elif predicted and not actual:
            fp += 1
        elif not predicted and actual:
            fn += 1
        else:
            tn += 1
    return EvalReport.from_counts(tp, fp, fn, tn, runtime_per_doc)


@dataclass
class ComplexityReport:
    entity_similarity: float
    stream_entropy: float  # bits
    normalized_similarity: float = 1.0
    normalized_entropy: float = 1.0
    normalized_product: float = 1.0
    label: Optional[str] = None


def _entity_counts(docs: Sequence[AnnotatedDocument]) -> Counter:
    counts: Counter = Counter()
    for d in docs:
        counts.update(a.entity_id for a in d.annotations)
    return counts


def _entity_tfidf(counts: Counter, df: Counter, n_docs: int) -> dict[str, float]:
    return {
        e: c * (math.log((n_docs + 1) / (df[e] + 1)) + 1.0)
        for e, c in counts.items()
    }


def _cosine(a: dict[str, float], b: dict[str, float]) -> float:
    na = math.sqrt(sum(v * v for v in a.values()))
    nb = math.sqrt(sum(v * v for v in b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    if len(a) > len(b):
        a, b = b, a
    return sum(v * b.get(k, 0.0) for k, v in a.items()) / (na * nb)


def entity_entropy_bits(docs: Sequence[AnnotatedDocument]) -> float:
    """Shannon entropy (base 2) of the entity occurrence distribution."""
    counts = _entity_counts(docs)
    total = sum(counts.values())
    if total == 0:
        return 0.0
    h = 0.0
    for c in counts.values():
        p = c / total
        h -= p * math.log2(p)
    return h


def story_complexity(
    seed: Sequence[AnnotatedDocument], stream: Sequence[AnnotatedDocument],
    label: Optional[str] = None,
) -> ComplexityReport:
    """Seed-vs-stream entity tf-idf similarity and stream entity entropy.

    The normalized fields are min-max scaled across a batch of reports via
    normalize_reports(); a lone report normalizes to 1 x 1.
    """
    if not seed or not stream:
        raise MetricsError("story_complexity needs non-empty seed and stream")
    df: Counter = Counter()
    for d in list(seed) + list(stream):
        df.update({a.entity_id for a in d.annotations})
    n_docs = len(seed) + len(stream)
    seed_vec = _entity_tfidf(_entity_counts(seed), df, n_docs)
    stream_vec = _entity_tfidf(_entity_counts(stream), df, n_docs)
    return ComplexityReport(
        entity_similarity=_cosine(seed_vec, stream_vec),
        stream_entropy=entity_entropy_bits(stream),
        label=label,
    )


def normalize_reports(reports: Sequence[ComplexityReport]) -> list[ComplexityReport]:
    """Min-max normalize similarity and entropy across the batch and set the
    complexity product. Degenerate spans (all equal, or a single story)
    normalize to 1."""
    if not reports:
        return []

    def scaled(values: list[float]) -> list[float]:
        lo, hi = min(values), max(values)
        if hi == lo:
            return [1.0] * len(values)
        return [(v - lo) / (hi - lo) for v in values]

    sims = scaled([r.entity_similarity for r in reports])
    ents = scaled([r.stream_entropy for r in reports])
    out = []
    for r, s, e in zip(reports, sims, ents):
        out.append(ComplexityReport(
            entity_similarity=r.entity_similarity,
            stream_entropy=r.stream_entropy,
            normalized_similarity=s,
            normalized_entropy=e,
            normalized_product=s * e,
            label=r.label,
        ))
    return out
