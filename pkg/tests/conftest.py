from datetime import datetime, timedelta, timezone

import pytest

from storytrack.corpus import Document


def ts(minutes: int = 0, seconds: int = 0) -> datetime:
    return datetime(2016, 2, 1, 10, 0, 0, tzinfo=timezone.utc) + timedelta(
        minutes=minutes, seconds=seconds
    )


def make_doc(doc_id="d1", minutes=0, source="article", text="Some text here.",
             hashtags=None, story_label=None, relevant=None, seconds=0):
    return Document(
        id=doc_id,
        timestamp=ts(minutes, seconds=seconds),
        source=source,
        text=text,
        hashtags=hashtags or [],
        story_label=story_label,
        relevant=relevant,
    )


@pytest.fixture
def doc_factory():
    return make_doc
