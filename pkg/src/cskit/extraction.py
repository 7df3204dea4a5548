"""One-hop / two-hop commonsense triplet extraction between concept pairs.

A direct edge always wins (highest weight, ties by relation name). Otherwise
two-hop search runs only when the endpoint cosine reaches `pair_gate`, and a
middle concept qualifies only when its cosine with at least one endpoint
exceeds `middle_gate`. Among qualifying two-edge paths the one with the
highest summed weight is kept, ties broken by middle surface then relation
names, making the output total and deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

from .graph import ConceptGraph, normalize_concept
from .triplets import SPECIAL_TOKEN, Triplet, TripletChain, flatten_chains

PAIR_GATE = 0.3
MIDDLE_GATE = 0.5


def _triplet(assertion) -> Triplet:
    return Triplet(assertion.head, assertion.relation, assertion.tail)


def _best_direct(graph: ConceptGraph, a: str, b: str):
    connecting = graph.connecting_assertions(a, b)
    if not connecting:
        return None
    return min(
        (assertion for assertion, _ in connecting),
        key=lambda x: (-x.weight, x.relation, x.head, x.tail),
    )


def extract_pair(
    graph: ConceptGraph,
    store,
    a: str,
    b: str,
    pair_gate: float = PAIR_GATE,
    middle_gate: float = MIDDLE_GATE,
) -> TripletChain | None:
    """Best one-hop triplet, else best gated two-hop chain, else None."""
    na, nb = normalize_concept(a), normalize_concept(b)
    aid = graph.concept_index.get(na)
    bid = graph.concept_index.get(nb)
    if aid is None or bid is None or aid == bid:
        return None

    direct = _best_direct(graph, na, nb)
    if direct is not None:
        return TripletChain((_triplet(direct),))

    sim = store.cosine(na, nb)
    if sim is None or sim < pair_gate:
        return None

    a_neighbors = {nid for nid, _, _ in graph.neighbor_entries(aid)}
    b_neighbors = {nid for nid, _, _ in graph.neighbor_entries(bid)}
    best = None
    best_key = None
    for mid in a_neighbors & b_neighbors:
        if mid in (aid, bid):
            continue
        middle = graph.concepts[mid]
        sim_ma = store.cosine(middle, na)
        sim_mb = store.cosine(middle, nb)
        if not (
            (sim_ma is not None and sim_ma > middle_gate)
            or (sim_mb is not None and sim_mb > middle_gate)
        ):
            continue
        for first, _ in graph.connecting_assertions(na, middle):
            for second, _ in graph.connecting_assertions(middle, nb):
                key = (
                    -(first.weight + second.weight),
                    middle,
                    first.relation,
                    second.relation,
                    first.head,
                    first.tail,
                    second.head,
                    second.tail,
                )
                if best_key is None or key < best_key:
                    best_key = key
                    best = (first, second)
    if best is None:
        return None
    return TripletChain((_triplet(best[0]), _triplet(best[1])))


@dataclass(frozen=True)
class PairExtraction:
    a: str
    b: str
    chain: TripletChain | None

    @property
    def kind(self) -> str | None:
        if self.chain is None:
            return None
        return "one_hop" if len(self.chain) == 1 else "two_hop"


@dataclass
class ExtractionResult:
    pairs: list[PairExtraction]

    @property
    def chains(self) -> list[TripletChain]:
        return [p.chain for p in self.pairs if p.chain is not None]

    @property
    def flattened(self) -> str:
        return flatten_chains(self.chains)

    @property
    def triplet_count(self) -> int:
        return sum(len(c) for c in self.chains)

    @property
    def usable(self) -> bool:
        return bool(self.chains)


def extract_set(
    graph: ConceptGraph,
    store,
    concepts,
    pair_gate: float = PAIR_GATE,
    middle_gate: float = MIDDLE_GATE,
) -> ExtractionResult:
    """Run extract_pair over all unordered pairs in input order."""
    seen = []
    for concept in concepts:
        surface = normalize_concept(concept)
        if surface and surface not in seen:
            seen.append(surface)
    if len(seen) < 2:
        raise ValueError("a concept set needs at least 2 distinct concepts")
    pairs = [
        PairExtraction(a, b, extract_pair(graph, store, a, b, pair_gate, middle_gate))
        for a, b in combinations(seen, 2)
    ]
    return ExtractionResult(pairs)


# -- two-way records ----------------------------------------------------------

CS_TO_SENTENCE = "cs_to_sentence"
SENTENCE_TO_CS = "sentence_to_cs"


@dataclass(frozen=True)
class TwoWayRecord:
    direction: str
    input: str
    target: str

    def to_dict(self) -> dict:
        return {"direction": self.direction, "input": self.input, "target": self.target}


@dataclass
class TwoWayStats:
    pairs: int = 0
    records: int = 0
    skipped_entries: int = 0
    total_triplets: int = 0

    @property
    def mean_triplets(self) -> float | None:
        return self.total_triplets / self.pairs if self.pairs else None

    def to_dict(self) -> dict:
        return {
            "pairs": self.pairs,
            "records": self.records,
            "skipped_entries": self.skipped_entries,
            "mean_triplets": self.mean_triplets,
        }


def read_commongen_jsonl(path):
    """Yield (concepts, sentences) from {"concepts": [...], "sentences": [...]} lines."""
    with open(path, "rt", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            row = json.loads(line)
            yield row["concepts"], row["sentences"]


def build_two_way(
    entries,
    graph: ConceptGraph,
    store,
    pair_gate: float = PAIR_GATE,
    middle_gate: float = MIDDLE_GATE,
) -> tuple[list[TwoWayRecord], TwoWayStats]:
    """Both-direction records for every (extraction, sentence) pair.

    Entries whose extraction comes up empty are counted and skipped.
    """
    records: list[TwoWayRecord] = []
    stats = TwoWayStats()
    for concepts, sentences in entries:
        result = extract_set(graph, store, concepts, pair_gate, middle_gate)
        if not result.usable:
            stats.skipped_entries += 1
            continue
        cs_text = f"{SPECIAL_TOKEN} {result.flattened}"
        for sentence in sentences:
            records.append(TwoWayRecord(CS_TO_SENTENCE, cs_text, sentence))
            records.append(TwoWayRecord(SENTENCE_TO_CS, sentence, cs_text))
            stats.pairs += 1
            stats.records += 2
            stats.total_triplets += result.triplet_count
    return records, stats
