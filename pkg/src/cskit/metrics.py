"""Parse generated chain text and score it against the concept graph.

The parser is total: every non-empty triplet segment either yields a triplet
or a recorded parse error, never an exception. Scoring counts, per parsed
triplet, whether any edge connects the (head, tail) pair (concepts accuracy)
and whether the exact directed assertion exists (assertion accuracy);
unparsed segments are excluded from the denominator.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .graph import ConceptGraph
from .relations import name_of
from .triplets import SPECIAL_TOKEN, Triplet, TripletChain

_BRACKET_SPAN = re.compile(r"\[[^\[\]]*\]")


@dataclass(frozen=True)
class ParseFailure:
    segment: str
    reason: str


@dataclass
class ParsedOutput:
    chains: list[TripletChain] = field(default_factory=list)
    errors: list[ParseFailure] = field(default_factory=list)

    @property
    def triplets(self) -> list[Triplet]:
        return [t for chain in self.chains for t in chain]


def _parse_triplet(segment: str) -> Triplet | ParseFailure:
    spans = _BRACKET_SPAN.findall(segment)
    if len(spans) != 1:
        reason = "missing relation phrase" if not spans else "multiple relation phrases"
        return ParseFailure(segment, reason)
    relation = name_of(spans[0])
    if relation is None:
        return ParseFailure(segment, "unknown relation phrase")
    left, right = segment.split(spans[0], 1)
    head, tail = left.strip(), right.strip()
    if not head:
        return ParseFailure(segment, "empty head concept")
    if not tail:
        return ParseFailure(segment, "empty tail concept")
    return Triplet(head, relation, tail)


def parse_chains(text: str) -> ParsedOutput:
    """Best-effort parse of generated text into triplet chains."""
    out = ParsedOutput()
    body = text.strip()
    if body.startswith(SPECIAL_TOKEN):
        body = body[len(SPECIAL_TOKEN) :].lstrip()
        if body.startswith(":"):
            body = body[1:].lstrip()
    for chain_segment in body.split(";"):
        if not chain_segment.strip():
            continue
        triplets = []
        for triplet_segment in chain_segment.split(","):
            if not triplet_segment.strip():
                continue
            parsed = _parse_triplet(triplet_segment.strip())
            if isinstance(parsed, ParseFailure):
                out.errors.append(parsed)
            else:
                triplets.append(parsed)
        if triplets:
            out.chains.append(TripletChain(tuple(triplets)))
    return out


@dataclass
class AccuracyReport:
    total: int = 0
    pair_hits: int = 0
    assertion_hits: int = 0
    unparsed: int = 0
    graph_label: str = ""
    either_direction: bool = False

    @property
    def concepts_acc(self) -> float | None:
        return self.pair_hits / self.total if self.total else None

    @property
    def assertion_acc(self) -> float | None:
        return self.assertion_hits / self.total if self.total else None

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "pair_hits": self.pair_hits,
            "assertion_hits": self.assertion_hits,
            "unparsed": self.unparsed,
            "concepts_acc": self.concepts_acc,
            "assertion_acc": self.assertion_acc,
            "graph_label": self.graph_label,
            "either_direction": self.either_direction,
        }

    def summary(self) -> str:
        if self.total == 0:
            return f"no parseable triplets ({self.unparsed} unparsed segments)"
        return (
            f"concepts accuracy {100.0 * self.concepts_acc:.2f}% / "
            f"assertion accuracy {100.0 * self.assertion_acc:.2f}% "
            f"({self.total} triplets, {self.unparsed} unparsed segments, "
            f"graph: {self.graph_label or 'unlabeled'})"
        )


def score(
    parsed,
    graph: ConceptGraph,
    either_direction: bool = False,
    graph_label: str = "",
) -> AccuracyReport:
    """Score one ParsedOutput or an iterable of them against the graph.

    Assertion existence is direction-sensitive by default; either_direction
    also accepts the reversed orientation. Duplicated triplets count per
    occurrence.
    """
    outputs = [parsed] if isinstance(parsed, ParsedOutput) else list(parsed)
    report = AccuracyReport(either_direction=either_direction, graph_label=graph_label)
    for output in outputs:
        report.unparsed += len(output.errors)
        for triplet in output.triplets:
            report.total += 1
            match = graph.lookup(triplet.head, triplet.tail, triplet.relation)
            hit_pair = match.pair_exists
            hit_assertion = bool(match.assertion_exists)
            if either_direction and not hit_assertion:
                reverse = graph.lookup(triplet.tail, triplet.head, triplet.relation)
                hit_assertion = bool(reverse.assertion_exists)
            if hit_pair:
                report.pair_hits += 1
            if hit_assertion:
                report.assertion_hits += 1
    return report


def read_generations(path):
    """One generation per line; JSON-Lines rows may carry it under "text"
    (falling back to "target" or "generation")."""
    with open(path, "rt", encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.lstrip().startswith("{"):
                try:
                    row = json.loads(line)
                except json.JSONDecodeError:
                    yield line
                    continue
                for key in ("text", "target", "generation"):
                    if key in row:
                        yield str(row[key])
                        break
                else:
                    yield line
            else:
                yield line
