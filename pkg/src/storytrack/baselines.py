"""Comparison systems: bag-of-words logistic regression (plain, +SSL,
+entities), seeded k-means clustering, and the IR-similarity L2R baseline.

Every baseline exposes train(seed_pos, seed_neg) / classify(doc) -> bool so
the evaluation harness can treat all systems uniformly.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .corpus import Document
from .entitylink import AnnotatedDocument
from .features import StoryRepresentation, build_tfidf_profile, tokenize

BOW = "bow"
BOW_PLUS_ENTITIES = "bow_plus_entities"

SSL_BATCH_SIZE = 50

BM25_K1 = 1.2
BM25_B = 0.75
DIRICHLET_MU = 2000.0


class BaselineError(ValueError):
    pass


def _text_of(doc) -> str:
    if isinstance(doc, AnnotatedDocument):
        return doc.doc.text
    if isinstance(doc, Document):
        return doc.text
    return str(doc)


def _entity_ids_of(doc) -> list[str]:
    if isinstance(doc, AnnotatedDocument):
        return doc.entity_ids
    return []


@dataclass
class BowModel:
    """Logistic regression over tf-idf bag-of-words (optionally plus
    bag-of-entities counts). Vocabulary and idf are frozen at training."""

    vocab: dict[str, int]
    idf: np.ndarray
    entity_vocab: dict[str, int]
    weights: np.ndarray
    bias: float
    featurizer: str
    l2: float
    train_docs: list = field(default_factory=list, repr=False)

    def vectorize(self, doc) -> np.ndarray:
        x = np.zeros(len(self.vocab) + len(self.entity_vocab))
        for tok, count in Counter(tokenize(_text_of(doc))).items():
            j = self.vocab.get(tok)
            if j is not None:
                x[j] = count * self.idf[j]
        if self.featurizer == BOW_PLUS_ENTITIES:
            for eid, count in Counter(_entity_ids_of(doc)).items():
                j = self.entity_vocab.get(eid)
                if j is not None:
                    x[len(self.vocab) + j] = count
        return x

    def predict_proba(self, doc) -> float:
        z = float(self.weights @ self.vectorize(doc)) + self.bias
        return 1.0 / (1.0 + math.exp(-z))


def logreg_loss_grad(X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2: float):
    """Mean log-loss with L2 penalty on the weights (bias unpenalized);
    returns (loss, grad_w, grad_b)."""
    z = X @ w + b
    # numerically stable: log(1+e^z) - y z
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + 0.5 * l2 * float(w @ w)
    sigma = 1.0 / (1.0 + np.exp(-z))
    err = sigma - y
    grad_w = X.T @ err / X.shape[0] + l2 * w
    grad_b = float(np.mean(err))
    return loss, grad_w, grad_b


def _lipschitz(X: np.ndarray, l2: float) -> float:
    # largest singular value via power iteration on X^T X
    v = np.ones(X.shape[1]) / math.sqrt(X.shape[1])
    s = 1.0
    for _ in range(50):
        u = X.T @ (X @ v)
        s = float(np.linalg.norm(u))
        if s == 0.0:
            break
        v = u / s
    return s / (4.0 * X.shape[0]) + l2 + 0.25  # +0.25 covers the bias column


def train_logreg(
    labeled_docs: Sequence[tuple[object, bool]],
    featurizer: str = BOW,
    l2: float = 1e-4,
    max_epochs: int = 1000,
    grad_tol: float = 1e-6,
) -> BowModel:
    """Fit L2-regularized logistic regression by gradient descent until the
    gradient norm drops below grad_tol (or max_epochs)."""
    if featurizer not in (BOW, BOW_PLUS_ENTITIES):
        raise BaselineError(f"unknown featurizer {featurizer!r}")
    labels = {bool(label) for _, label in labeled_docs}
    if labels != {True, False}:
        raise BaselineError("training data must contain both classes")

    df: Counter = Counter()
    vocab_terms: set[str] = set()
    entity_terms: set[str] = set()
    for doc, _ in labeled_docs:
        toks = set(tokenize(_text_of(doc)))
        df.update(toks)
        vocab_terms |= toks
        if featurizer == BOW_PLUS_ENTITIES:
            entity_terms |= set(_entity_ids_of(doc))
    vocab = {t: i for i, t in enumerate(sorted(vocab_terms))}
    entity_vocab = (
        {e: i for i, e in enumerate(sorted(entity_terms))}
        if featurizer == BOW_PLUS_ENTITIES else {}
    )
    n = len(labeled_docs)
    idf = np.array(
        [math.log((n + 1) / (df[t] + 1)) + 1.0 for t in sorted(vocab_terms)]
    ) if vocab else np.zeros(0)

    model = BowModel(
        vocab=vocab, idf=idf, entity_vocab=entity_vocab,
        weights=np.zeros(len(vocab) + len(entity_vocab)), bias=0.0,
        featurizer=featurizer, l2=l2, train_docs=list(labeled_docs),
    )
    X = np.stack([model.vectorize(doc) for doc, _ in labeled_docs])
    y = np.array([1.0 if label else 0.0 for _, label in labeled_docs])

    step = 1.0 / _lipschitz(X, l2)
    w = model.weights
    b = model.bias
    for _ in range(max_epochs):
        _, grad_w, grad_b = logreg_loss_grad(X, y, w, b, l2)
        gnorm = math.sqrt(float(grad_w @ grad_w) + grad_b * grad_b)
        if gnorm < grad_tol:
            break
        w = w - step * grad_w
        b = b - step * grad_b
    model.weights = w
    model.bias = b
    return model


def ssl_retrain(model: BowModel, batch: Sequence[tuple[object, bool]]) -> BowModel:
    """Accumulation-style SSL: append the pseudo-labeled batch to the
    training set and retrain from scratch."""
    if not batch:
        return model
    return train_logreg(
        list(model.train_docs) + list(batch),
        featurizer=model.featurizer,
        l2=model.l2,
    )


class TextBaseline:
    """Text / Text+SSL / Text+Entity binary classifier baseline."""

    def __init__(self, featurizer: str = BOW, ssl: bool = False,
                 ssl_batch: int = SSL_BATCH_SIZE):
        self.featurizer = featurizer
        self.ssl = ssl
        self.ssl_batch = ssl_batch
        self.model: Optional[BowModel] = None
        self._buffer: list[tuple[object, bool]] = []

    def train(self, seed_pos, seed_neg) -> None:
        labeled = [(d, True) for d in seed_pos] + [(d, False) for d in seed_neg]
        self.model = train_logreg(labeled, featurizer=self.featurizer)

    def classify_proba(self, doc) -> float:
        if self.model is None:
            raise BaselineError("train() must run before classify()")
        p = self.model.predict_proba(doc)
        if self.ssl:
            self._buffer.append((doc, p >= 0.5))
            if len(self._buffer) >= self.ssl_batch:
                self.model = ssl_retrain(self.model, self._buffer)
                self._buffer = []
        return p

    def classify(self, doc) -> bool:
        return self.classify_proba(doc) >= 0.5


@dataclass
class SeededKMeansModel:
    vocab: dict[str, int]
    idf: np.ndarray
    centroids: np.ndarray
    relevant_cluster_ids: set[int]
    objective_history: list[float]

    def vectorize(self, doc) -> np.ndarray:
        x = np.zeros(len(self.vocab))
        for tok, count in Counter(tokenize(_text_of(doc))).items():
            j = self.vocab.get(tok)
            if j is not None:
                x[j] = count * self.idf[j]
        norm = np.linalg.norm(x)
        return x / norm if norm > 0 else x

    def nearest(self, vec: np.ndarray) -> int:
        return int(np.argmax(self.centroids @ vec))

    def classify(self, doc) -> bool:
        return self.nearest(self.vectorize(doc)) in self.relevant_cluster_ids


def seeded_kmeans(
    stream_docs: Sequence, seed_docs: Sequence, k: int, rng_seed: int,
    max_iter: int = 100,
) -> SeededKMeansModel:
    """Spherical k-means over tf-idf vectors, seeded by the labeled
    examples: one centroid from the positive seeds, the rest from random
    negatives (then random stream docs). Clusters holding a positive seed
    classify as relevant."""
    all_docs = list(seed_docs) + list(stream_docs)
    if k < 1 or k > len(all_docs):
        raise BaselineError(f"k={k} out of range for {len(all_docs)} documents")
    pos_seeds = [d for d in seed_docs if getattr(d, "relevant", None)]
    neg_seeds = [d for d in seed_docs if not getattr(d, "relevant", None)]
    if not pos_seeds:
        raise BaselineError("seeded k-means needs at least one positive seed")

    df: Counter = Counter()
    for d in all_docs:
        df.update(set(tokenize(_text_of(d))))
    vocab = {t: i for i, t in enumerate(sorted(df))}
    n = len(all_docs)
    idf = np.array([math.log((n + 1) / (df[t] + 1)) + 1.0 for t in sorted(df)])
    model = SeededKMeansModel(
        vocab=vocab, idf=idf, centroids=np.zeros((k, len(vocab))),
        relevant_cluster_ids=set(), objective_history=[],
    )

    X = np.stack([model.vectorize(d) for d in all_docs])
    pos_idx = [i for i, d in enumerate(seed_docs) if getattr(d, "relevant", None)]
    pos_mean = X[pos_idx].mean(axis=0)
    norm = np.linalg.norm(pos_mean)
    centroids = [pos_mean / norm if norm > 0 else pos_mean]

    rng = random.Random(rng_seed)
    neg_idx = [i for i, d in enumerate(seed_docs) if not getattr(d, "relevant", None)]
    other_idx = list(range(len(seed_docs), len(all_docs)))
    pool = rng.sample(neg_idx, len(neg_idx)) + rng.sample(other_idx, len(other_idx))
    for i in pool[: k - 1]:
        centroids.append(X[i])
    if len(centroids) < k:
        raise BaselineError(f"not enough documents to place {k} centroids")
    C = np.stack(centroids)

    assign = np.full(len(all_docs), -1)
    for _ in range(max_iter):
        sims = X @ C.T
        new_assign = np.argmax(sims, axis=1)
        model.objective_history.append(float(np.sum(1.0 - np.max(sims, axis=1))))
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(k):
            members = X[assign == c]
            if len(members) == 0:
                continue  # empty cluster keeps its centroid
            mean = members.mean(axis=0)
            norm = np.linalg.norm(mean)
            C[c] = mean / norm if norm > 0 else mean

    model.centroids = C
    model.relevant_cluster_ids = {int(assign[i]) for i in pos_idx}
    return model


class KMeansBaseline:
    """Harness wrapper: fit on the stream once, then classify per doc."""

    def __init__(self, k: Optional[int] = None, rng_seed: int = 0):
        self.k = k
        self.rng_seed = rng_seed
        self.model: Optional[SeededKMeansModel] = None
        self._seeds: list = []

    def train(self, seed_pos, seed_neg) -> None:
        self._seeds = list(seed_pos) + list(seed_neg)

    def fit_stream(self, stream_docs: Sequence) -> None:
        k = self.k if self.k is not None else 1 + math.ceil(len(stream_docs) / 200)
        self.model = seeded_kmeans(stream_docs, self._seeds, k, self.rng_seed)

    def classify(self, doc) -> bool:
        if self.model is None:
            raise BaselineError("fit_stream() must run before classify()")
        return self.model.classify(doc)


class CollectionStats:
    """Corpus-level term statistics for BM25 and query-likelihood scoring."""

    def __init__(self):
        self.n_docs = 0
        self.df: Counter = Counter()
        self.cf: Counter = Counter()
        self.total_terms = 0

    def observe(self, text: str) -> None:
        toks = tokenize(text)
        self.n_docs += 1
        self.df.update(set(toks))
        self.cf.update(toks)
        self.total_terms += len(toks)

    def observe_all(self, texts) -> None:
        for t in texts:
            self.observe(t)

    @property
    def avgdl(self) -> float:
        return self.total_terms / self.n_docs if self.n_docs else 0.0

    def bm25_idf(self, term: str) -> float:
        d = self.df[term]
        return math.log(1.0 + (self.n_docs - d + 0.5) / (d + 0.5))


def bm25_score(query_tokens, doc_tf: Counter, doc_len: int,
               stats: CollectionStats, k1: float = BM25_K1, b: float = BM25_B) -> float:
    avgdl = stats.avgdl
    score = 0.0
    for term in sorted(set(query_tokens)):
        tf = doc_tf.get(term, 0)
        if tf == 0:
            continue
        denom = tf + k1 * (1.0 - b + b * doc_len / avgdl)
        score += stats.bm25_idf(term) * tf * (k1 + 1.0) / denom
    return score


def query_likelihood(query_tokens, doc_tf: Counter, doc_len: int,
                     stats: CollectionStats, mu: float = DIRICHLET_MU) -> float:
    """Dirichlet-smoothed log P(query | doc); terms unseen in the whole
    collection are skipped."""
    score = 0.0
    for term in query_tokens:
        cf = stats.cf.get(term, 0)
        if cf == 0:
            continue
        p_bg = cf / stats.total_terms
        score += math.log((doc_tf.get(term, 0) + mu * p_bg) / (doc_len + mu))
    return score


class L2RBaselineFeaturizer:
    """The 3 IR similarity features (tf-idf cosine, BM25, query likelihood)
    of one document against a story representation."""

    def __init__(self, story: StoryRepresentation, stats: CollectionStats,
                 k1: float = BM25_K1, b: float = BM25_B, mu: float = DIRICHLET_MU):
        self.story = story
        self.stats = stats
        self.k1, self.b, self.mu = k1, b, mu
        story_tokens = []
        for d in story.story_docs.values():
            story_tokens.extend(tokenize(d.doc.text))
        self.story_tf = Counter(story_tokens)
        self.story_len = len(story_tokens)

    def features(self, doc) -> tuple[float, float, float]:
        doc_profile = build_tfidf_profile([_text_of(doc)], self.story.idf)
        cos = self.story.relevant_profile.cosine(doc_profile)
        q = tokenize(_text_of(doc))
        bm25 = bm25_score(q, self.story_tf, self.story_len, self.stats,
                          k1=self.k1, b=self.b)
        ql = query_likelihood(q, self.story_tf, self.story_len, self.stats, mu=self.mu)
        return (cos, bm25, ql)


def l2r_baseline_features(story: StoryRepresentation, doc,
                          stats: CollectionStats) -> tuple[float, float, float]:
    return L2RBaselineFeaturizer(story, stats).features(doc)
