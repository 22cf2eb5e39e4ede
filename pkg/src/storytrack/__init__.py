"""Story tracking over mixed news/tweet streams.

Stories are represented by an entity co-occurrence graph plus tf-idf
profiles; a pre-trained pointwise relevance forest classifies stream
documents, and semi-supervised selection keeps the representation current.
"""

__version__ = "0.1.0"

from .corpus import CorpusStream, Document, load_jsonl, save_jsonl
from .entitylink import (
    AnnotatedDocument,
    EntityAnnotation,
    GazetteerLinker,
    Mention,
    RemoteTagmeLinker,
    SyntheticLinker,
    annotate_document,
)
from .features import FeatureVector, StoryRepresentation, extract_features
from .relevance import (
    ForestConfig,
    RandomForestModel,
    StoryRepSpec,
    TrainingPair,
    generate_training_pairs,
    load_model,
    predict_probability,
    save_model,
    train_forest,
)
from .storygraph import EntityGraph, GraphConfig, window_length
from .tracker import (
    Strategy,
    TrackDecision,
    TrackerConfig,
    TrackerState,
    init_story,
    process_document,
    run_stream,
)

__all__ = [
    "AnnotatedDocument",
    "CorpusStream",
    "Document",
    "EntityAnnotation",
    "EntityGraph",
    "FeatureVector",
    "ForestConfig",
    "GazetteerLinker",
    "GraphConfig",
    "Mention",
    "RandomForestModel",
    "RemoteTagmeLinker",
    "Strategy",
    "StoryRepSpec",
    "StoryRepresentation",
    "SyntheticLinker",
    "TrackDecision",
    "TrackerConfig",
    "TrackerState",
    "TrainingPair",
    "annotate_document",
    "extract_features",
    "generate_training_pairs",
    "init_story",
    "load_jsonl",
    "load_model",
    "predict_probability",
    "process_document",
    "run_stream",
    "save_jsonl",
    "save_model",
    "train_forest",
    "window_length",
]
