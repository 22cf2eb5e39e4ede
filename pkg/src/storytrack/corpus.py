"""Document model, JSONL corpus ingestion, chronological splitting and
negative sampling for mixed article/tweet streams."""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Iterable, Iterator, Optional

ARTICLE = "article"
TWEET = "tweet"
SOURCES = (ARTICLE, TWEET)

# Title/body boundary in characters (tweet-length based).
TITLE_CHAR_LIMIT = 140

# Sanity bound for tweet text length (4x the classic limit).
MAX_TWEET_CHARS = 560

NEGATIVE_WINDOW_PAD = timedelta(hours=24)


class CorpusError(ValueError):
    """Malformed corpus data or violated document invariants."""


class InsufficientPositivesError(CorpusError):
    pass


class InsufficientNegativesError(CorpusError):
    pass


@dataclass
class Document:
    """One stream item: a news article or a tweet.

    ``text`` is the flattened content (for structured articles the title is
    the first sentence). ``relevant`` is ground truth for evaluation only.
    """

    id: str
    timestamp: datetime
    source: str
    text: str
    hashtags: list[str] = field(default_factory=list)
    story_label: Optional[str] = None
    relevant: Optional[bool] = None

    def __post_init__(self):
        if not self.id:
            raise CorpusError("document id must be non-empty")
        if not self.text:
            raise CorpusError(f"document {self.id!r}: text must be non-empty")
        if self.source not in SOURCES:
            raise CorpusError(f"document {self.id!r}: unknown source {self.source!r}")
        if self.source == TWEET and len(self.text) > MAX_TWEET_CHARS:
            raise CorpusError(
                f"document {self.id!r}: tweet text exceeds {MAX_TWEET_CHARS} chars"
            )
        if self.timestamp.tzinfo is None:
            self.timestamp = self.timestamp.replace(tzinfo=timezone.utc)
        else:
            self.timestamp = self.timestamp.astimezone(timezone.utc)

    def sort_key(self) -> tuple[datetime, str]:
        return (self.timestamp, self.id)


class CorpusStream:
    """Documents in chronological order (ties broken by id)."""

    def __init__(self, documents: Iterable[Document]):
        docs = sorted(documents, key=Document.sort_key)
        seen: set[str] = set()
        for d in docs:
            if d.id in seen:
                raise CorpusError(f"duplicate document id {d.id!r}")
            seen.add(d.id)
        self.documents: list[Document] = docs

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def __len__(self) -> int:
        return len(self.documents)

    def __getitem__(self, i):
        return self.documents[i]

    def __eq__(self, other):
        return isinstance(other, CorpusStream) and self.documents == other.documents


def parse_timestamp(value: str) -> datetime:
    """Parse an RFC3339 timestamp; naive values are taken as UTC."""
    if value.endswith(("Z", "z")):
        value = value[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(value)
    except ValueError as exc:
        raise CorpusError(f"bad timestamp {value!r}: {exc}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def document_from_dict(obj: dict) -> Document:
    for key in ("id", "timestamp", "source", "text"):
        if key not in obj:
            raise CorpusError(f"missing required field {key!r}")
    relevant = obj.get("relevant")
    if relevant is not None and not isinstance(relevant, bool):
        raise CorpusError(f"field 'relevant' must be a boolean, got {relevant!r}")
    story_label = obj.get("story_label")
    return Document(
        id=str(obj["id"]),
        timestamp=parse_timestamp(str(obj["timestamp"])),
        source=str(obj["source"]),
        text=str(obj["text"]),
        hashtags=[str(h) for h in obj.get("hashtags") or []],
        story_label=None if story_label is None else str(story_label),
        relevant=relevant,
    )


def document_to_dict(doc: Document) -> dict:
    obj = {
        "id": doc.id,
        "timestamp": format_timestamp(doc.timestamp),
        "source": doc.source,
        "text": doc.text,
        "hashtags": list(doc.hashtags),
    }
    if doc.story_label is not None:
        obj["story_label"] = doc.story_label
    if doc.relevant is not None:
        obj["relevant"] = doc.relevant
    return obj


def load_jsonl(path) -> CorpusStream:
    """Load one JSON document per line; result is chronologically sorted.

    Errors carry the 1-based line number of the offending line.
    """
    docs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            try:
                docs.append(document_from_dict(obj))
            except CorpusError as exc:
                raise CorpusError(f"{path}:{lineno}: {exc}") from None
    try:
        return CorpusStream(docs)
    except CorpusError as exc:
        raise CorpusError(f"{path}: {exc}") from None


def save_jsonl(stream: CorpusStream, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in stream:
            fh.write(json.dumps(document_to_dict(doc), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def split_title_body(doc: Document) -> tuple[str, str]:
    """Split text at the fixed 140-character boundary (unicode chars, not bytes)."""
    return doc.text[:TITLE_CHAR_LIMIT], doc.text[TITLE_CHAR_LIMIT:]


def chronological_split(
    stream: CorpusStream, n_pos_articles: int, n_pos_tweets: int
) -> tuple[list[Document], CorpusStream]:
    """Take the earliest relevant articles/tweets as seed; the rest stays a stream."""
    seed: list[Document] = []
    want_articles, want_tweets = n_pos_articles, n_pos_tweets
    seed_ids: set[str] = set()
    for doc in stream:
        if not doc.relevant:
            continue
        if doc.source == ARTICLE and want_articles > 0:
            seed.append(doc)
            seed_ids.add(doc.id)
            want_articles -= 1
        elif doc.source == TWEET and want_tweets > 0:
            seed.append(doc)
            seed_ids.add(doc.id)
            want_tweets -= 1
        if want_articles == 0 and want_tweets == 0:
            break
    if want_articles > 0 or want_tweets > 0:
        raise InsufficientPositivesError(
            f"need {n_pos_articles} relevant articles and {n_pos_tweets} relevant "
            f"tweets, stream is short by {want_articles} articles / {want_tweets} tweets"
        )
    rest = CorpusStream(d for d in stream if d.id not in seed_ids)
    return seed, rest


def sample_negatives(
    stream: CorpusStream,
    positives: list[Document],
    ratio: int,
    rng_seed: int,
) -> list[Document]:
    """Uniformly sample ratio x |positives| irrelevant docs from the positives'
    time window (padded by 24h on each side). Deterministic for a fixed seed."""
    if not positives:
        return []
    lo = min(p.timestamp for p in positives) - NEGATIVE_WINDOW_PAD
    hi = max(p.timestamp for p in positives) + NEGATIVE_WINDOW_PAD
    candidates = [
        d for d in stream if d.relevant is False and lo <= d.timestamp <= hi
    ]
    k = ratio * len(positives)
    if len(candidates) < k:
        raise InsufficientNegativesError(
            f"need {k} negatives in window, only {len(candidates)} available"
        )
    rng = random.Random(rng_seed)
    chosen = rng.sample(candidates, k)
    chosen.sort(key=Document.sort_key)
    return chosen


def strip_label_tokens(text: str, tokens: Iterable[str]) -> str:
    """Remove label-leaking keywords/hashtags as whole tokens, case-insensitively.

    Collapses whitespace runs left behind by the removal.
    """
    out = text
    for tok in tokens:
        if not tok:
            continue
        pattern = r"(?<!\w)" + re.escape(tok) + r"(?!\w)"
        out = re.sub(pattern, " ", out, flags=re.IGNORECASE)
    return re.sub(r"[ \t]+", " ", out).strip()
