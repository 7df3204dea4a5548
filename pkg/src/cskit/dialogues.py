"""Commonsense-annotated dialogue training records.

For every response position the last three turns form the context. Keywords
are mined from the context and from the response; chains are extracted for
context x context keyword pairs (provenance "context_only") and for
context x response pairs ("context_response"). A chain produced by both pair
pools is tagged "both_sides". The serialized target puts the chain block
before a ``[SYSTEM]`` marker and the response text, so a decoder has an
unambiguous boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

from .extraction import MIDDLE_GATE, PAIR_GATE, extract_pair
from .graph import ConceptGraph, normalize_concept
from .keywords import CorpusStats, build_stats, extract_keywords
from .triplets import SPECIAL_TOKEN, TripletChain, flatten_chains

CONTEXT_TURN_CAP = 3

CONTEXT_ONLY = "context_only"
CONTEXT_RESPONSE = "context_response"
BOTH_SIDES = "both_sides"


@dataclass(frozen=True)
class DialogueTurn:
    speaker: str  # "USER" or "SYSTEM"
    text: str


@dataclass(frozen=True)
class TaggedChain:
    chain: TripletChain
    provenance: str


@dataclass(frozen=True)
class DialogueRecord:
    dialogue_id: str
    turn_index: int
    context: tuple[DialogueTurn, ...]
    response: str
    chains: tuple[TaggedChain, ...]


@dataclass
class DialogueStats:
    records: int = 0
    skipped_dialogues: int = 0
    context_only: int = 0
    context_response: int = 0
    both_sides: int = 0

    @property
    def total_chains(self) -> int:
        return self.context_only + self.context_response + self.both_sides

    def percentages(self) -> dict[str, float] | None:
        total = self.total_chains
        if total == 0:
            return None
        return {
            CONTEXT_ONLY: 100.0 * self.context_only / total,
            CONTEXT_RESPONSE: 100.0 * self.context_response / total,
            BOTH_SIDES: 100.0 * self.both_sides / total,
        }

    def to_dict(self) -> dict:
        return {
            "records": self.records,
            "skipped_dialogues": self.skipped_dialogues,
            "chains": {
                CONTEXT_ONLY: self.context_only,
                CONTEXT_RESPONSE: self.context_response,
                BOTH_SIDES: self.both_sides,
            },
            "percentages": self.percentages(),
        }


def read_dialogues(path):
    """Load Commonsense-Dialogues-style JSON: id -> {"turns": [...]}.

    A top-level list of {"id", "turns"} objects is accepted too.
    """
    with open(path, "rt", encoding="utf-8") as handle:
        data = json.load(handle)
    if isinstance(data, dict):
        return [(str(did), list(entry["turns"])) for did, entry in data.items()]
    return [(str(entry["id"]), list(entry["turns"])) for entry in data]


def _tag_context(turns: list[str]) -> tuple[DialogueTurn, ...]:
    # alternate speakers backwards from the response: the turn right before
    # the response is always USER
    tagged = []
    for offset, text in enumerate(reversed(turns)):
        speaker = "USER" if offset % 2 == 0 else "SYSTEM"
        tagged.append(DialogueTurn(speaker, text))
    return tuple(reversed(tagged))


def build_records(
    dialogues,
    graph: ConceptGraph,
    store,
    k: int = 5,
    pair_gate: float = PAIR_GATE,
    middle_gate: float = MIDDLE_GATE,
    lexicon=None,
    stopwords=None,
    stats: CorpusStats | None = None,
) -> tuple[list[DialogueRecord], DialogueStats]:
    """One record per response position (sliding window over each dialogue).

    Dialogues without a response turn are skipped and counted. Document
    frequencies are computed over all turns unless `stats` is given.
    """
    dialogues = list(dialogues)
    if stats is None:
        stats = build_stats(t for _, turns in dialogues for t in turns)
    tally = DialogueStats()
    records: list[DialogueRecord] = []

    for dialogue_id, turns in dialogues:
        if len(turns) < 2:
            tally.skipped_dialogues += 1
            continue
        for index in range(1, len(turns)):
            window = turns[max(0, index - CONTEXT_TURN_CAP) : index]
            response = turns[index]
            context_keywords = extract_keywords(
                " ".join(window), stats, lexicon, k, stopwords, graph
            ).texts
            response_keywords = extract_keywords(
                response, stats, lexicon, k, stopwords, graph
            ).texts

            found: dict[str, tuple[TripletChain, set[str]]] = {}

            def record_chain(chain: TripletChain | None, provenance: str) -> None:
                if chain is None:
                    return
                key = chain.serialize()
                if key not in found:
                    found[key] = (chain, set())
                found[key][1].add(provenance)

            for a, b in combinations(context_keywords, 2):
                record_chain(
                    extract_pair(graph, store, a, b, pair_gate, middle_gate), CONTEXT_ONLY
                )
            for a in context_keywords:
                for b in response_keywords:
                    if normalize_concept(a) == normalize_concept(b):
                        continue
                    record_chain(
                        extract_pair(graph, store, a, b, pair_gate, middle_gate),
                        CONTEXT_RESPONSE,
                    )

            tagged = []
            for chain, sources in found.values():
                if len(sources) == 2:
                    provenance = BOTH_SIDES
                    tally.both_sides += 1
                elif CONTEXT_ONLY in sources:
                    provenance = CONTEXT_ONLY
                    tally.context_only += 1
                else:
                    provenance = CONTEXT_RESPONSE
                    tally.context_response += 1
                tagged.append(TaggedChain(chain, provenance))

            records.append(
                DialogueRecord(
                    dialogue_id, index, _tag_context(window), response, tuple(tagged)
                )
            )
            tally.records += 1
    return records, tally


def serialize_record(record: DialogueRecord) -> tuple[str, str]:
    """(input, target): tagged context in, chains + [SYSTEM] + response out."""
    input_text = " ".join(f"[{t.speaker}] {t.text}" for t in record.context)
    chain_block = flatten_chains(t.chain for t in record.chains)
    if chain_block:
        target = f"{SPECIAL_TOKEN} {chain_block} [SYSTEM] {record.response}"
    else:
        target = f"[SYSTEM] {record.response}"
    return input_text, target


def record_to_dict(record: DialogueRecord) -> dict:
    input_text, target = serialize_record(record)
    return {
        "dialogue_id": record.dialogue_id,
        "turn_index": record.turn_index,
        "input": input_text,
        "target": target,
        "provenance": [t.provenance for t in record.chains],
    }
