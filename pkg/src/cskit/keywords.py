"""TF-IDF + part-of-speech keyword selection for utterances.

Scoring is tf * ln((1 + N) / (1 + df)) over lowercase, punctuation-stripped
tokens. Tokens on the stopword list or without a noun/verb/adjective reading
are dropped. The POS source is a shipped lexicon with suffix-heuristic
fallback (unknown tokens default to a noun reading); there is no statistical
tagger, which keeps extraction deterministic.

When a set of graph concepts is supplied, multi-word spans of the utterance
that are themselves concepts (up to 4 words) also become candidates, scored
by the mean of their member-token scores.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .graph import normalize_concept

KEEP_POS = frozenset({"noun", "verb", "adj"})
MAX_SPAN = 4

_TOKEN = re.compile(r"[a-z0-9']+")


def tokenize(text: str) -> list[str]:
    return [t for t in (m.strip("'") for m in _TOKEN.findall(text.lower())) if t]


@dataclass
class CorpusStats:
    document_count: int
    doc_frequency: dict[str, int]

    def idf(self, token: str) -> float:
        return math.log((1 + self.document_count) / (1 + self.doc_frequency.get(token, 0)))


def build_stats(utterances) -> CorpusStats:
    """Document frequencies over a corpus; each utterance is one document."""
    document_count = 0
    doc_frequency: dict[str, int] = {}
    for utterance in utterances:
        document_count += 1
        for token in set(tokenize(utterance)):
            doc_frequency[token] = doc_frequency.get(token, 0) + 1
    if document_count == 0:
        raise ValueError("cannot build corpus statistics from an empty corpus")
    return CorpusStats(document_count, doc_frequency)


class PosLexicon:
    def __init__(self, table: dict[str, frozenset[str]]):
        self.table = table

    @classmethod
    def load(cls, path) -> "PosLexicon":
        table = {}
        with open(path, "rt", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                token, _, tags = line.partition("\t")
                table[token] = frozenset(t for t in tags.split(",") if t)
        return cls(table)

    def readings(self, token: str) -> frozenset[str]:
        known = self.table.get(token)
        if known:
            return known
        return _suffix_readings(token)


def _suffix_readings(token: str) -> frozenset[str]:
    if len(token) > 4 and token.endswith("ly"):
        return frozenset({"adv"})
    if len(token) > 4 and token.endswith("ing"):
        return frozenset({"noun", "verb", "adj"})
    if len(token) > 3 and token.endswith("ed"):
        return frozenset({"verb", "adj"})
    if token.endswith(("tion", "sion", "ment", "ness", "ship", "hood", "ism", "ity")):
        return frozenset({"noun"})
    if token.endswith(("ous", "ful", "less", "able", "ible", "ive", "ish")):
        return frozenset({"adj"})
    # bare unknown words are most often nouns
    return frozenset({"noun"})


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    text = resources.files("cskit").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


@lru_cache(maxsize=1)
def default_lexicon() -> PosLexicon:
    table = {}
    text = resources.files("cskit").joinpath("data/pos_lexicon.tsv").read_text("utf-8")
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        token, _, tags = line.partition("\t")
        table[token] = frozenset(t for t in tags.split(",") if t)
    return PosLexicon(table)


@dataclass(frozen=True)
class Keyword:
    text: str
    score: float


@dataclass
class KeywordSet:
    keywords: list[Keyword]

    @property
    def texts(self) -> list[str]:
        return [k.text for k in self.keywords]

    def __len__(self) -> int:
        return len(self.keywords)

    def __iter__(self):
        return iter(self.keywords)


def extract_keywords(
    utterance: str,
    stats: CorpusStats,
    lexicon: PosLexicon | None = None,
    k: int = 5,
    stopwords: frozenset[str] | None = None,
    graph_concepts=None,
) -> KeywordSet:
    """Top-k keywords by TF-IDF after stopword and POS filtering.

    Ties break in favor of tokens that are graph concepts, then
    lexicographically. graph_concepts may be any container of normalized
    surfaces (a ConceptGraph works).
    """
    lexicon = lexicon or default_lexicon()
    stopwords = default_stopwords() if stopwords is None else stopwords
    tokens = tokenize(utterance)
    tf: dict[str, int] = {}
    for token in tokens:
        tf[token] = tf.get(token, 0) + 1

    scores = {token: count * stats.idf(token) for token, count in tf.items()}

    candidates: dict[str, float] = {}
    for token, score in scores.items():
        if token in stopwords:
            continue
        if not (lexicon.readings(token) & KEEP_POS):
            continue
        candidates[token] = score

    if graph_concepts is not None:
        for size in range(2, MAX_SPAN + 1):
            for i in range(len(tokens) - size + 1):
                span = tokens[i : i + size]
                surface = normalize_concept(" ".join(span))
                if surface in candidates or surface not in graph_concepts:
                    continue
                if all(word in stopwords for word in span):
                    continue
                candidates[surface] = sum(scores[w] for w in span) / size

    def in_graph(text: str) -> int:
        if graph_concepts is None:
            return 1
        return 0 if normalize_concept(text) in graph_concepts else 1

    ranked = sorted(candidates.items(), key=lambda kv: (-kv[1], in_graph(kv[0]), kv[0]))
    return KeywordSet([Keyword(text, score) for text, score in ranked[:k]])
