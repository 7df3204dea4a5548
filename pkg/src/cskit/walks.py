"""Biased random walks over the concept graph.

The next-step distribution follows the second-order scheme with return
parameter p and in-out parameter q: the unnormalized weight of hopping from
the current concept v to a candidate x is the endpoint cosine w_vx on the
first step, and alpha(t, x) * w_vx afterwards, where t is the previous
concept and alpha is 1/p, 1 or 1/q for hop distance d(t, x) of 0, 1 or 2.
Candidates with undefined or non-positive w_vx are excluded.
"""

from __future__ import annotations

import hashlib
import random
from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import accumulate

from .graph import Assertion, ConceptGraph


class UnknownConceptError(Exception):
    pass


@dataclass(frozen=True)
class WalkConfig:
    p: float = 2.0
    q: float = 1.5
    length: int = 10
    passes: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be positive")
        if self.length < 2:
            raise ValueError("walk length must be at least 2 concepts")
        if self.passes < 1:
            raise ValueError("passes must be at least 1")

    def to_dict(self) -> dict:
        return dict(vars(self))


@dataclass(frozen=True)
class TransitionCandidate:
    concept: str
    assertion: Assertion
    forward: bool
    pi: float
    probability: float


@dataclass(frozen=True)
class TransitionDistribution:
    candidates: tuple[TransitionCandidate, ...]
    z: float
    _cumulative: tuple[float, ...] = field(repr=False, default=())

    def sample(self, rng: random.Random) -> TransitionCandidate:
        idx = bisect_right(self._cumulative, rng.random() * self.z)
        return self.candidates[min(idx, len(self.candidates) - 1)]


@dataclass(frozen=True)
class WalkStep:
    concept: str
    assertion: Assertion
    forward: bool


@dataclass(frozen=True)
class Walk:
    start: str
    steps: tuple[WalkStep, ...]

    @property
    def concepts(self) -> list[str]:
        return [self.start] + [s.concept for s in self.steps]

    def __len__(self) -> int:
        return 1 + len(self.steps)

    @property
    def is_empty(self) -> bool:
        return len(self.steps) == 0


def _edge_weight(assertion: Assertion, store) -> float | None:
    if assertion.sim_weight is not None:
        return assertion.sim_weight
    if store is None:
        return None
    return store.cosine(assertion.head, assertion.tail)


def transition_distribution(
    graph: ConceptGraph,
    store,
    prev: str | None,
    current: str,
    cfg: WalkConfig,
) -> TransitionDistribution | None:
    """Next-step distribution out of `current`; None signals a dead end."""
    cid = graph.concept_index.get(current)
    if cid is None:
        raise UnknownConceptError(current)
    prev_id = graph.concept_index.get(prev) if prev is not None else None
    prev_adjacent: set[int] = set()
    if prev_id is not None:
        prev_adjacent = {nid for nid, _, _ in graph.neighbor_entries(prev_id)}

    raw: list[tuple[int, Assertion, bool, float]] = []
    for nid, aidx, fwd in graph.neighbor_entries(cid):
        assertion = graph.assertions[aidx]
        w = _edge_weight(assertion, store)
        if w is None or w <= 0:
            continue
        if prev_id is None:
            alpha = 1.0
        elif nid == prev_id:
            alpha = 1.0 / cfg.p
        elif nid in prev_adjacent:
            alpha = 1.0
        else:
            # candidate and previous concept always share `current`, so the
            # remaining hop distance is exactly 2
            alpha = 1.0 / cfg.q
        raw.append((nid, assertion, fwd, alpha * w))

    if not raw:
        return None
    z = sum(pi for _, _, _, pi in raw)
    candidates = tuple(
        TransitionCandidate(graph.concepts[nid], assertion, fwd, pi, pi / z)
        for nid, assertion, fwd, pi in raw
    )
    cumulative = tuple(accumulate(pi for _, _, _, pi in raw))
    return TransitionDistribution(candidates, z, cumulative)


def sample_walk(
    graph: ConceptGraph,
    store,
    start: str,
    cfg: WalkConfig,
    rng: random.Random,
) -> Walk:
    """Walk of at most cfg.length concepts; stops early at a dead end."""
    if start not in graph.concept_index:
        raise UnknownConceptError(start)
    steps: list[WalkStep] = []
    prev: str | None = None
    current = start
    while 1 + len(steps) < cfg.length:
        dist = transition_distribution(graph, store, prev, current, cfg)
        if dist is None:
            break
        chosen = dist.sample(rng)
        steps.append(WalkStep(chosen.concept, chosen.assertion, chosen.forward))
        prev, current = current, chosen.concept
    return Walk(start, tuple(steps))


def walk_rng(seed: int, pass_index: int, concept_id: int) -> random.Random:
    """Independent deterministic stream per (seed, pass, start concept)."""
    digest = hashlib.blake2b(
        f"{seed}:{pass_index}:{concept_id}".encode(), digest_size=8
    ).digest()
    return random.Random(int.from_bytes(digest, "big"))


def generate_walks(
    graph: ConceptGraph,
    store,
    cfg: WalkConfig,
    start_concepts: list[str] | None = None,
    workers: int = 1,
):
    """Yield non-empty walks, one per (pass, start concept), in canonical
    (pass, concept id) order regardless of worker count."""
    if start_concepts is None:
        starts = list(enumerate(graph.concepts))
    else:
        starts = []
        for surface in start_concepts:
            cid = graph.concept_index.get(surface)
            if cid is None:
                raise UnknownConceptError(surface)
            starts.append((cid, graph.concepts[cid]))

    def run(task):
        pass_index, cid, surface = task
        return sample_walk(graph, store, surface, cfg, walk_rng(cfg.seed, pass_index, cid))

    tasks = [
        (pass_index, cid, surface)
        for pass_index in range(1, cfg.passes + 1)
        for cid, surface in starts
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for walk in pool.map(run, tasks, chunksize=64):
                if not walk.is_empty:
                    yield walk
    else:
        for task in tasks:
            walk = run(task)
            if not walk.is_empty:
                yield walk


def walk_to_record(walk: Walk) -> dict:
    """JSON-serializable form: start, concept list and assertion list."""
    return {
        "start": walk.start,
        "concepts": walk.concepts,
        "assertions": [
            {"head": s.assertion.head, "relation": s.assertion.relation, "tail": s.assertion.tail}
            for s in walk.steps
        ],
    }
