"""ConceptNet-style assertion store: loading, filtering and adjacency queries.

Two input formats are understood:

* full dump rows: ``/a/[...]<TAB>/r/RelatedTo<TAB>/c/en/plate<TAB>/c/en/restaurant<TAB>{"weight": 2.0}``
* compact fixture rows: ``plate<TAB>RelatedTo<TAB>restaurant<TAB>2.0``

Assertions are directed (the stored head/relation/tail orientation is kept for
serialization) but adjacency is symmetric, so walks and lookups reach every
edge from both endpoints.
"""

from __future__ import annotations

import gzip
import json
import math
import re
from dataclasses import dataclass, field
from collections import deque

from .relations import canonical_relation

# Characters reserved by the chain syntax; they may not appear in concepts.
_RESERVED = set("[],;")
_WS = re.compile(r"\s+")

# hop_distance() return value for "farther than the cap".
HOP_BEYOND = 3


class GraphLoadError(Exception):
    """Raised when an assertion dump cannot be ingested."""


def normalize_concept(text: str) -> str:
    """Lowercase, underscores to spaces, single-space separators."""
    return _WS.sub(" ", text.replace("_", " ").strip().lower())


def is_valid_concept(surface: str) -> bool:
    return bool(surface) and not (_RESERVED & set(surface))


@dataclass(frozen=True)
class Assertion:
    head: str
    relation: str
    tail: str
    weight: float
    sim_weight: float | None = None


@dataclass
class LoadReport:
    path: str
    loaded: int = 0
    skipped_malformed: int = 0
    skipped_unmapped_relation: int = 0
    skipped_language: int = 0
    skipped_self_loop: int = 0

    def to_dict(self) -> dict:
        return dict(vars(self))

    def summary(self) -> str:
        return (
            f"loaded {self.loaded} assertions from {self.path} "
            f"(skipped: {self.skipped_malformed} malformed, "
            f"{self.skipped_unmapped_relation} unmapped relation, "
            f"{self.skipped_language} other language, "
            f"{self.skipped_self_loop} self-loop)"
        )


@dataclass
class FilterReport:
    kept: int = 0
    dropped_weight: int = 0
    dropped_similarity: int = 0
    dropped_no_embedding: int = 0
    min_weight: float = 1.0
    min_sim: float = 0.0

    def to_dict(self) -> dict:
        return dict(vars(self))

    def summary(self) -> str:
        return (
            f"kept {self.kept} assertions "
            f"(dropped: {self.dropped_weight} weight < {self.min_weight}, "
            f"{self.dropped_similarity} similarity < {self.min_sim}, "
            f"{self.dropped_no_embedding} missing embedding)"
        )


@dataclass(frozen=True)
class MatchReport:
    pair_exists: bool
    assertion_exists: bool | None = None


class ConceptGraph:
    """Adjacency-indexed assertion store. Immutable once built."""

    def __init__(self) -> None:
        self.concepts: list[str] = []
        self.concept_index: dict[str, int] = {}
        self.assertions: list[Assertion] = []
        # per concept id: list of (neighbor id, assertion index, is_forward)
        self.adjacency: list[list[tuple[int, int, bool]]] = []

    # -- construction ------------------------------------------------------

    def _concept_id(self, surface: str) -> int:
        cid = self.concept_index.get(surface)
        if cid is None:
            cid = len(self.concepts)
            self.concept_index[surface] = cid
            self.concepts.append(surface)
            self.adjacency.append([])
        return cid

    def _add(self, assertion: Assertion) -> None:
        idx = len(self.assertions)
        self.assertions.append(assertion)
        h = self._concept_id(assertion.head)
        t = self._concept_id(assertion.tail)
        self.adjacency[h].append((t, idx, True))
        self.adjacency[t].append((h, idx, False))

    @classmethod
    def from_assertions(cls, rows) -> "ConceptGraph":
        """Build a graph from (head, relation, tail, weight[, sim]) tuples.

        Concepts are normalized; rows are kept in input order. Intended for
        fixtures and snapshot loading.
        """
        graph = cls()
        for row in rows:
            head, relation, tail, weight = row[:4]
            sim = row[4] if len(row) > 4 else None
            graph._add(
                Assertion(
                    normalize_concept(head),
                    relation,
                    normalize_concept(tail),
                    float(weight),
                    sim,
                )
            )
        return graph

    # -- queries -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.assertions)

    def __contains__(self, concept: str) -> bool:
        return normalize_concept(concept) in self.concept_index

    def neighbor_entries(self, cid: int) -> list[tuple[int, int, bool]]:
        return self.adjacency[cid]

    def neighbors(self, concept: str) -> list[tuple[str, Assertion, bool]]:
        """(neighbor surface, assertion, is_forward) in insertion order.

        Unknown concepts yield an empty list.
        """
        cid = self.concept_index.get(normalize_concept(concept))
        if cid is None:
            return []
        return [
            (self.concepts[nid], self.assertions[aidx], fwd)
            for nid, aidx, fwd in self.adjacency[cid]
        ]

    def hop_distance(self, t: str, x: str, cap: int = 2) -> int:
        """Shortest-path hops between two concepts, BFS capped at `cap`.

        Returns 0, 1, ..., cap, or HOP_BEYOND when farther (or unreachable).
        """
        tid = self.concept_index.get(normalize_concept(t))
        xid = self.concept_index.get(normalize_concept(x))
        if tid is None or xid is None:
            return HOP_BEYOND
        if tid == xid:
            return 0
        seen = {tid}
        frontier = deque([(tid, 0)])
        while frontier:
            node, depth = frontier.popleft()
            if depth == cap:
                continue
            for nid, _, _ in self.adjacency[node]:
                if nid == xid:
                    return depth + 1
                if nid not in seen:
                    seen.add(nid)
                    frontier.append((nid, depth + 1))
        return HOP_BEYOND

    def lookup(self, head: str, tail: str, relation: str | None = None) -> MatchReport:
        """Whether any edge connects the pair, and whether the exact directed
        (head, relation, tail) assertion exists."""
        hid = self.concept_index.get(normalize_concept(head))
        tid = self.concept_index.get(normalize_concept(tail))
        if hid is None or tid is None:
            return MatchReport(False, False if relation is not None else None)
        pair = False
        exact = False
        for nid, aidx, fwd in self.adjacency[hid]:
            if nid != tid:
                continue
            pair = True
            if relation is not None and fwd and self.assertions[aidx].relation == relation:
                exact = True
        if relation is None:
            return MatchReport(pair, None)
        return MatchReport(pair, exact)

    def connecting_assertions(self, a: str, b: str) -> list[tuple[Assertion, bool]]:
        """Every assertion between a and b, either direction, insertion order."""
        aid = self.concept_index.get(normalize_concept(a))
        bid = self.concept_index.get(normalize_concept(b))
        if aid is None or bid is None:
            return []
        return [
            (self.assertions[aidx], fwd)
            for nid, aidx, fwd in self.adjacency[aid]
            if nid == bid
        ]


# -- ingestion ---------------------------------------------------------------


def _parse_uri_concept(uri: str, lang_filter: str) -> tuple[str | None, str]:
    # /c/en/ice_cream or /c/en/ice_cream/n/...; language must match.
    parts = uri.split("/")
    if len(parts) < 4 or parts[1] != "c" or not parts[3]:
        return None, "malformed"
    if parts[2] != lang_filter:
        return None, "language"
    return parts[3], ""


def _parse_row(fields: list[str], lang_filter: str):
    """Returns (head, relation_raw, tail, weight) or a skip reason string."""
    if len(fields) >= 5 and fields[1].startswith("/r/"):
        relation_raw = fields[1][len("/r/"):]
        head, head_reason = _parse_uri_concept(fields[2], lang_filter)
        tail, tail_reason = _parse_uri_concept(fields[3], lang_filter)
        if head is None or tail is None:
            return "malformed" if "malformed" in (head_reason, tail_reason) else "language"
        try:
            weight = float(json.loads(fields[4]).get("weight"))
        except (ValueError, TypeError, json.JSONDecodeError):
            return "malformed"
        return head, relation_raw, tail, weight
    if len(fields) == 4:
        head, relation_raw, tail, weight_text = fields
        try:
            weight = float(weight_text)
        except ValueError:
            return "malformed"
        return head, relation_raw, tail, weight
    return "malformed"


def load_assertions(path, lang_filter: str = "en") -> tuple[ConceptGraph, LoadReport]:
    """Ingest a dump file into an (unfiltered) ConceptGraph.

    Rows with unmapped relations, malformed fields, other languages or
    self-loops are counted and skipped. An unreadable file or a file that
    yields zero assertions raises GraphLoadError.
    """
    report = LoadReport(path=str(path))
    graph = ConceptGraph()
    opener = gzip.open if str(path).endswith(".gz") else open
    try:
        handle = opener(path, "rt", encoding="utf-8")
    except OSError as exc:
        raise GraphLoadError(f"cannot read assertion dump {path}: {exc}") from exc
    with handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parsed = _parse_row(line.split("\t"), lang_filter)
            if parsed == "malformed":
                report.skipped_malformed += 1
                continue
            if parsed == "language":
                report.skipped_language += 1
                continue
            head_raw, relation_raw, tail_raw, weight = parsed
            relation = canonical_relation(relation_raw)
            if relation is None:
                report.skipped_unmapped_relation += 1
                continue
            head = normalize_concept(head_raw)
            tail = normalize_concept(tail_raw)
            if not (is_valid_concept(head) and is_valid_concept(tail)) or weight < 0 or not math.isfinite(weight):
                report.skipped_malformed += 1
                continue
            if head == tail:
                report.skipped_self_loop += 1
                continue
            graph._add(Assertion(head, relation, tail, weight))
            report.loaded += 1
    if not graph.assertions:
        raise GraphLoadError(f"no assertions loaded from {path}")
    return graph, report


def filter_graph(
    graph: ConceptGraph,
    store,
    min_weight: float = 1.0,
    min_sim: float = 0.0,
) -> tuple[ConceptGraph, FilterReport]:
    """Keep assertions with weight >= min_weight and endpoint cosine >= min_sim.

    The retained assertions carry their cosine in sim_weight. Assertions whose
    endpoints have no embedding are dropped and counted. Filtering down to an
    empty graph is legal; the report says so.
    """
    report = FilterReport(min_weight=min_weight, min_sim=min_sim)
    filtered = ConceptGraph()
    for a in graph.assertions:
        if a.weight < min_weight:
            report.dropped_weight += 1
            continue
        sim = store.cosine(a.head, a.tail)
        if sim is None:
            report.dropped_no_embedding += 1
            continue
        if sim < min_sim:
            report.dropped_similarity += 1
            continue
        filtered._add(Assertion(a.head, a.relation, a.tail, a.weight, sim))
        report.kept += 1
    return filtered, report


# -- snapshots ---------------------------------------------------------------

SNAPSHOT_FORMAT = "cskit-graph/1"


def save_snapshot(graph: ConceptGraph, path, meta: dict | None = None) -> None:
    """Persist an indexed graph (with sim weights) as gzip or plain JSON."""
    payload = {
        "format": SNAPSHOT_FORMAT,
        "meta": meta or {},
        "assertions": [
            [a.head, a.relation, a.tail, a.weight, a.sim_weight]
            for a in graph.assertions
        ],
    }
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "wt", encoding="utf-8") as handle:
        json.dump(payload, handle, ensure_ascii=False, sort_keys=True)


def load_snapshot(path) -> tuple[ConceptGraph, dict]:
    opener = gzip.open if str(path).endswith(".gz") else open
    try:
        with opener(path, "rt", encoding="utf-8") as handle:
            payload = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphLoadError(f"cannot read graph snapshot {path}: {exc}") from exc
    if payload.get("format") != SNAPSHOT_FORMAT:
        raise GraphLoadError(f"{path} is not a {SNAPSHOT_FORMAT} snapshot")
    graph = ConceptGraph.from_assertions(payload["assertions"])
    return graph, payload.get("meta", {})
