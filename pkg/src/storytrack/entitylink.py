"""Mention extraction and entity disambiguation.

A pluggable linker contract with a remote wikification client and two
deterministic offline implementations, plus hashtag-grouped tweet
disambiguation for short texts.
"""

from __future__ import annotations

import os
import re
import time
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Optional, Protocol, Sequence

import requests

from ._nouns import COMMON_NOUNS
from .corpus import TWEET, Document

CONFIDENCE_FLOOR = 0.5
FREQUENT_NOUN_MIN_COUNT = 3

TAGME_URL_ENV = "STORYTRACK_TAGME_URL"
TAGME_TOKEN_ENV = "STORYTRACK_TAGME_TOKEN"

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)
_SENTENCE_ENDERS = frozenset(".!?\n")
_SKIPPABLE_BEFORE = frozenset(" \t\"'“”‘’()[]")

# Closed-class words never treated as nouns, and the filter that lets
# sentence-initial capitals through ("Irish Water..." at text start).
_FUNCTION_WORDS = frozenset(
    """
    a an the this that these those some any each every no all both either
    neither i you he she it we they me him her us them my your his its our
    their mine yours hers ours theirs myself yourself himself herself itself
    ourselves themselves who whom whose which what when where why how there
    here and but or nor so yet if then than as at by for from in into of off
    on onto out over to under up with without about above across after
    against along among around before behind below beneath beside between
    beyond down during except inside near outside since through throughout
    till toward towards until upon within is are was were be been being am
    do does did done have has had having will would shall should can could
    may might must not never also just only even still again once more most
    much many few little very too quite rather such own same other another
    because while although though unless however therefore moreover
    meanwhile yesterday today tomorrow now said says say new old first last
    next one two three
    """.split()
)


class EntityLinkError(ValueError):
    """Bad input to the annotation pipeline."""


class RemoteLinkerError(RuntimeError):
    """Remote wikification failed after the configured retries."""


@dataclass(frozen=True)
class Mention:
    surface: str
    start: int
    end: int


@dataclass(frozen=True)
class EntityAnnotation:
    entity_id: str
    position: int
    confidence: float


@dataclass
class AnnotatedDocument:
    doc: Document
    annotations: list[EntityAnnotation]
    available: bool = True

    @property
    def entity_ids(self) -> list[str]:
        return [a.entity_id for a in self.annotations]


@dataclass
class TweetGroup:
    hashtag: Optional[str]
    bucket_start: datetime
    tweets: list[Document] = field(default_factory=list)


class Linker(Protocol):
    """Maps mention surfaces (with document context) to knowledge-base hits."""

    def link_document(
        self, mentions: Sequence[Mention], context: str
    ) -> list[Optional[tuple[str, float]]]:
        """One (entity_id, confidence) or None per mention."""
        ...


def _is_sentence_initial(text: str, start: int) -> bool:
    i = start - 1
    while i >= 0 and text[i] in _SKIPPABLE_BEFORE:
        i -= 1
    return i < 0 or text[i] in _SENTENCE_ENDERS


def extract_mentions(text: str) -> list[Mention]:
    """Find noun and noun-phrase mentions with exact character offsets.

    Kept tokens: capitalized words (proper nouns), lowercase words from the
    bundled noun lexicon (common nouns), and lowercase words repeated at
    least 3 times in the document (frequent nouns). Runs of adjacent
    same-kind noun tokens separated by a single space merge into one
    mention, so "Irish Water" is a single phrase but a capitalized phrase
    never swallows a following common noun.
    """
    tokens = list(_TOKEN_RE.finditer(text))
    if not tokens:
        return []
    lower_counts = Counter(m.group().lower() for m in tokens)

    # kind: "proper" | "common" | None
    kinds: list[Optional[str]] = []
    for m in tokens:
        tok = m.group()
        low = tok.lower()
        if len(tok) < 2 or low in _FUNCTION_WORDS or tok[0].isdigit():
            kinds.append(None)
        elif tok[0].isupper():
            kinds.append("proper")
        elif low in COMMON_NOUNS or lower_counts[low] >= FREQUENT_NOUN_MIN_COUNT:
            kinds.append("common")
        else:
            kinds.append(None)

    mentions: list[Mention] = []
    i = 0
    while i < len(tokens):
        kind = kinds[i]
        if kind is None:
            i += 1
            continue
        j = i
        while (
            j + 1 < len(tokens)
            and kinds[j + 1] == kind
            and text[tokens[j].end() : tokens[j + 1].start()] == " "
        ):
            j += 1
        start, end = tokens[i].start(), tokens[j].end()
        mentions.append(Mention(surface=text[start:end], start=start, end=end))
        i = j + 1
    return mentions


def assign_synthetic_id(surface: str) -> str:
    """Stable fake knowledge-base id: lowercase, whitespace collapsed."""
    if not surface:
        raise EntityLinkError("cannot build a synthetic id from an empty surface")
    return "SYN:" + " ".join(surface.lower().split())


def link(
    mentions: Sequence[Mention], context: str, linker: Linker
) -> list[EntityAnnotation]:
    """One annotation per mention; low-confidence and unmapped mentions get
    synthetic ids with confidence 0."""
    results = linker.link_document(mentions, context)
    annotations = []
    for mention, hit in zip(mentions, results):
        if hit is not None and hit[1] >= CONFIDENCE_FLOOR:
            annotations.append(
                EntityAnnotation(entity_id=hit[0], position=mention.start, confidence=hit[1])
            )
        else:
            annotations.append(
                EntityAnnotation(
                    entity_id=assign_synthetic_id(mention.surface),
                    position=mention.start,
                    confidence=0.0,
                )
            )
    return annotations


class SyntheticLinker:
    """Offline fallback: never maps anything, so every mention gets a SYN id."""

    def link_document(self, mentions, context):
        return [None] * len(mentions)


class GazetteerLinker:
    """Offline table lookup; highest-confidence entry wins per surface."""

    def __init__(self, entries: dict[str, tuple[str, float]] | None = None):
        self.entries = dict(entries or {})

    @staticmethod
    def _key(surface: str) -> str:
        return " ".join(surface.lower().split())

    @classmethod
    def from_pairs(cls, pairs) -> "GazetteerLinker":
        """pairs: iterable of (surface, entity_id, confidence)."""
        entries: dict[str, tuple[str, float]] = {}
        for surface, entity_id, conf in pairs:
            key = cls._key(surface)
            conf = float(conf)
            if key not in entries or conf > entries[key][1]:
                entries[key] = (entity_id, conf)
        return cls(entries)

    @classmethod
    def from_tsv(cls, path) -> "GazetteerLinker":
        pairs = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise EntityLinkError(
                        f"{path}:{lineno}: expected surface<TAB>id<TAB>confidence"
                    )
                pairs.append((parts[0], parts[1], float(parts[2])))
        return cls.from_pairs(pairs)

    def link_document(self, mentions, context):
        return [self.entries.get(self._key(m.surface)) for m in mentions]


class RemoteTagmeLinker:
    """Client for the TAGME v1.8 ``tag`` endpoint.

    Sends the document context, maps returned annotations back to mentions
    by start offset. Transport failures are retried with backoff, then a
    RemoteLinkerError is raised so the caller can fall back per document.
    """

    def __init__(self, url, token, timeout=10.0, retries=2, backoff=0.5,
                 session=None, sleep=time.sleep):
        self.url = url
        self.token = token
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.session = session or requests.Session()
        self._sleep = sleep

    @classmethod
    def from_env(cls, **kwargs) -> "RemoteTagmeLinker":
        url = os.environ.get(TAGME_URL_ENV)
        token = os.environ.get(TAGME_TOKEN_ENV)
        if not url or not token:
            raise EntityLinkError(
                f"remote linker needs {TAGME_URL_ENV} and {TAGME_TOKEN_ENV} set"
            )
        return cls(url, token, **kwargs)

    def _request(self, context: str) -> dict:
        resp = self.session.get(
            self.url,
            params={"text": context, "gcube-token": self.token},
            timeout=self.timeout,
        )
        resp.raise_for_status()
        return resp.json()

    def link_document(self, mentions, context):
        last_error = None
        for attempt in range(self.retries + 1):
            try:
                payload = self._request(context)
                break
            except (requests.RequestException, ValueError) as exc:
                last_error = exc
                if attempt < self.retries:
                    self._sleep(self.backoff * (attempt + 1))
        else:
            raise RemoteLinkerError(f"wikification request failed: {last_error}")
        by_start: dict[int, tuple[str, float]] = {}
        for ann in payload.get("annotations", []):
            try:
                start = int(ann["start"])
                entity_id = f"WD:{ann['id']}"
                rho = float(ann.get("rho", 0.0))
            except (KeyError, TypeError, ValueError):
                continue
            by_start[start] = (entity_id, rho)
        return [by_start.get(m.start) for m in mentions]


def annotate_document(
    doc: Document, linker: Linker, context: Optional[str] = None,
    context_offset: int = 0, available: bool = True,
) -> AnnotatedDocument:
    """Extract mentions from ``doc.text`` and link them.

    When a group of tweets is disambiguated together, ``context`` is the
    concatenated group text and ``context_offset`` is where this tweet's
    text starts inside it. A failing remote linker degrades to synthetic
    ids for this document only, so tracking never stalls.
    """
    mentions = extract_mentions(doc.text)
    if context is None:
        context, context_offset = doc.text, 0
    shifted = [
        Mention(m.surface, m.start + context_offset, m.end + context_offset)
        for m in mentions
    ]
    try:
        annotations = link(shifted, context, linker)
    except RemoteLinkerError:
        annotations = link(shifted, context, SyntheticLinker())
    annotations = [
        EntityAnnotation(a.entity_id, a.position - context_offset, a.confidence)
        for a in annotations
    ]
    annotations.sort(key=lambda a: a.position)
    return AnnotatedDocument(doc=doc, annotations=annotations, available=available)


def _bucket_start(ts: datetime, window: timedelta) -> datetime:
    seconds = int(window.total_seconds())
    epoch = int(ts.timestamp())
    return datetime.fromtimestamp(epoch - epoch % seconds, tz=timezone.utc)


def group_tweets_by_hashtag(
    tweets: Sequence[Document], window: timedelta = timedelta(hours=1)
) -> list[TweetGroup]:
    """Group tweets by shared hashtag within aligned time buckets.

    A tweet with k hashtags appears in k groups; hashtag-less tweets form
    singleton groups.
    """
    groups: dict[tuple[str, datetime], TweetGroup] = {}
    singletons: list[TweetGroup] = []
    for tweet in tweets:
        if tweet.source != TWEET:
            raise EntityLinkError(f"document {tweet.id!r} is not a tweet")
        bucket = _bucket_start(tweet.timestamp, window)
        if not tweet.hashtags:
            singletons.append(TweetGroup(hashtag=None, bucket_start=bucket, tweets=[tweet]))
            continue
        for tag in sorted({h.lower() for h in tweet.hashtags}):
            key = (tag, bucket)
            if key not in groups:
                groups[key] = TweetGroup(hashtag=tag, bucket_start=bucket)
            groups[key].tweets.append(tweet)
    out = list(groups.values()) + singletons
    for g in out:
        g.tweets.sort(key=Document.sort_key)
    out.sort(key=lambda g: (g.hashtag or "", g.bucket_start,
                            g.tweets[0].sort_key() if g.tweets else ("",)))
    return out


def annotate_tweets(
    tweets: Sequence[Document],
    linker: Linker,
    window: timedelta = timedelta(hours=1),
    available: bool = True,
) -> list[AnnotatedDocument]:
    """Annotate tweets with hashtag-group context.

    Each tweet is disambiguated exactly once, inside its largest group
    (ties: earliest bucket, then hashtag), with the group's concatenated
    text as surrounding context.
    """
    groups = group_tweets_by_hashtag(tweets, window=window)
    best: dict[str, TweetGroup] = {}
    for g in groups:
        for t in g.tweets:
            cur = best.get(t.id)
            if cur is None or (
                (-len(g.tweets), g.bucket_start, g.hashtag or "")
                < (-len(cur.tweets), cur.bucket_start, cur.hashtag or "")
            ):
                best[t.id] = g
    annotated = []
    for tweet in tweets:
        group = best[tweet.id]
        offset = 0
        context_parts = []
        for member in group.tweets:
            if member.id == tweet.id:
                offset = sum(len(p) + 1 for p in context_parts)
            context_parts.append(member.text)
        context = "\n".join(context_parts)
        annotated.append(
            annotate_document(tweet, linker, context=context,
                              context_offset=offset, available=available)
        )
    return annotated
