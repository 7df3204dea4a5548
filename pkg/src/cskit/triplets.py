"""Triplet chains and their surface serialization.

Grammar: a triplet serializes as ``head [phrase] tail``, triplets within a
chain are joined by ``", "``, and chains within a result are joined by
``"; "`` with a terminating ``";"``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .relations import phrase_of

SPECIAL_TOKEN = "<|commonsense|>"


@dataclass(frozen=True)
class Triplet:
    head: str
    relation: str
    tail: str

    def serialize(self) -> str:
        return f"{self.head} {phrase_of(self.relation)} {self.tail}"


@dataclass(frozen=True)
class TripletChain:
    triplets: tuple[Triplet, ...]

    def __post_init__(self):
        if not self.triplets:
            raise ValueError("a triplet chain cannot be empty")
        object.__setattr__(self, "triplets", tuple(self.triplets))

    def __len__(self) -> int:
        return len(self.triplets)

    def __iter__(self):
        return iter(self.triplets)

    def serialize(self) -> str:
        return ", ".join(t.serialize() for t in self.triplets)


def flatten_chains(chains) -> str:
    """Join chains with '; ' and terminate with ';'; empty input gives ''."""
    chains = list(chains)
    if not chains:
        return ""
    return "; ".join(c.serialize() for c in chains) + ";"
