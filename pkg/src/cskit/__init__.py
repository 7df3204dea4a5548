"""Commonsense knowledge-graph corpus synthesis, extraction and evaluation."""

from .graph import (
    Assertion,
    ConceptGraph,
    GraphLoadError,
    filter_graph,
    load_assertions,
    load_snapshot,
    normalize_concept,
    save_snapshot,
)
from .embeddings import EmbeddingLoadError, EmbeddingStore, load_embeddings
from .triplets import SPECIAL_TOKEN, Triplet, TripletChain, flatten_chains
from .walks import Walk, WalkConfig, generate_walks, sample_walk, transition_distribution
from .corpus import CorpusSplit, build_corpus, resample_prompts, serialize_walk
from .extraction import ExtractionResult, build_two_way, extract_pair, extract_set
from .keywords import CorpusStats, KeywordSet, build_stats, extract_keywords
from .dialogues import DialogueRecord, build_records, serialize_record
from .metrics import AccuracyReport, ParsedOutput, parse_chains, score

__version__ = "0.1.0"

__all__ = [
    "Assertion",
    "ConceptGraph",
    "GraphLoadError",
    "filter_graph",
    "load_assertions",
    "load_snapshot",
    "normalize_concept",
    "save_snapshot",
    "EmbeddingLoadError",
    "EmbeddingStore",
    "load_embeddings",
    "SPECIAL_TOKEN",
    "Triplet",
    "TripletChain",
    "flatten_chains",
    "Walk",
    "WalkConfig",
    "generate_walks",
    "sample_walk",
    "transition_distribution",
    "CorpusSplit",
    "build_corpus",
    "resample_prompts",
    "serialize_walk",
    "ExtractionResult",
    "build_two_way",
    "extract_pair",
    "extract_set",
    "CorpusStats",
    "KeywordSet",
    "build_stats",
    "extract_keywords",
    "DialogueRecord",
    "build_records",
    "serialize_record",
    "AccuracyReport",
    "ParsedOutput",
    "parse_chains",
    "score",
]
