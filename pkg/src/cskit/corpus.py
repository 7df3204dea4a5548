"""Turn walks into prompted training examples and deterministic splits.

Each walk serializes to a triplet chain; one of four prompt templates is
sampled per example (chains with a single triplet are only eligible for the
first two). The 80/10/10 split is a pure function of the chain hash and the
split seed, so membership does not depend on stream order.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, replace
from pathlib import Path

from .relations import phrase_of
from .triplets import SPECIAL_TOKEN, Triplet, TripletChain
from .walks import Walk

SPLIT_RATIOS = (0.8, 0.1, 0.1)
SPLIT_NAMES = ("train", "valid", "test")


def _derived_rng(*parts) -> random.Random:
    digest = hashlib.blake2b(
        ":".join(str(p) for p in parts).encode(), digest_size=8
    ).digest()
    return random.Random(int.from_bytes(digest, "big"))


def serialize_walk(walk: Walk) -> TripletChain:
    """Consecutive walk steps become triplets in stored orientation."""
    if len(walk) < 2:
        raise ValueError("cannot serialize a walk with fewer than 2 concepts")
    return TripletChain(
        tuple(
            Triplet(s.assertion.head, s.assertion.relation, s.assertion.tail)
            for s in walk.steps
        )
    )


def eligible_templates(chain: TripletChain) -> tuple[int, ...]:
    return (1, 2) if len(chain) == 1 else (1, 2, 3, 4)


def render_template(chain: TripletChain, template_id: int) -> str:
    """Prompt text for one of the four truncation templates."""
    first = chain.triplets[0]
    if template_id == 1:
        return f"{SPECIAL_TOKEN} {first.head} {phrase_of(first.relation)}"
    if template_id == 2:
        return f"{SPECIAL_TOKEN} {first.serialize()},"
    second = chain.triplets[1]
    if template_id == 3:
        return f"{SPECIAL_TOKEN} {first.serialize()}, {second.head} {phrase_of(second.relation)}"
    if template_id == 4:
        return f"{SPECIAL_TOKEN} {first.serialize()}, {second.serialize()},"
    raise ValueError(f"unknown template id {template_id}")


def apply_templates(chain: TripletChain, rng: random.Random) -> tuple[str, int]:
    """Uniformly pick an eligible template; returns (prompt, template_id)."""
    template_id = rng.choice(eligible_templates(chain))
    return render_template(chain, template_id), template_id


def example_id(target: str) -> str:
    return hashlib.blake2b(target.encode(), digest_size=16).hexdigest()


@dataclass(frozen=True)
class CorpusExample:
    id: str
    chain: TripletChain
    prompt: str
    target: str
    template_id: int


def split_sizes(n: int, ratios=SPLIT_RATIOS) -> tuple[int, int, int]:
    train = int(round(n * ratios[0]))
    valid = int(round(n * ratios[1]))
    return train, valid, n - train - valid


def assign_splits(ids, split_seed: int) -> dict[str, str]:
    """Deterministic 80/10/10 bucket per unique id, order-independent.

    Ids are ranked by a keyed hash and cut at the ratio boundaries, which
    keeps the split sizes exact (within rounding) while membership stays a
    function of the id population and the seed only.
    """
    unique = sorted(
        set(ids),
        key=lambda i: (hashlib.blake2b(f"{split_seed}:{i}".encode(), digest_size=16).hexdigest(), i),
    )
    train_n, valid_n, _ = split_sizes(len(unique))
    assignment = {}
    for rank, uid in enumerate(unique):
        if rank < train_n:
            assignment[uid] = "train"
        elif rank < train_n + valid_n:
            assignment[uid] = "valid"
        else:
            assignment[uid] = "test"
    return assignment


@dataclass
class CorpusSplit:
    train: list[CorpusExample]
    valid: list[CorpusExample]
    test: list[CorpusExample]
    split_seed: int

    def __iter__(self):
        yield from self.train
        yield from self.valid
        yield from self.test

    def counts(self) -> dict[str, int]:
        return {"train": len(self.train), "valid": len(self.valid), "test": len(self.test)}


def build_corpus(walks, split_seed: int) -> CorpusSplit:
    """Serialize, prompt and split a walk stream; error on an empty stream."""
    examples: list[CorpusExample] = []
    for walk in walks:
        chain = serialize_walk(walk)
        target = chain.serialize()
        eid = example_id(target)
        prompt, template_id = apply_templates(chain, _derived_rng("template", split_seed, eid))
        examples.append(CorpusExample(eid, chain, prompt, target, template_id))
    if not examples:
        raise ValueError("no walks to build a corpus from")
    assignment = assign_splits((e.id for e in examples), split_seed)
    split = CorpusSplit([], [], [], split_seed)
    for example in sorted(examples, key=lambda e: e.id):
        getattr(split, assignment[example.id]).append(example)
    return split


def resample_prompts(split: CorpusSplit, epoch_seed: int) -> CorpusSplit:
    """Fresh template choices for the training examples only."""
    train = []
    for example in split.train:
        prompt, template_id = apply_templates(
            example.chain, _derived_rng("template", epoch_seed, example.id)
        )
        train.append(replace(example, prompt=prompt, template_id=template_id))
    return CorpusSplit(train, list(split.valid), list(split.test), split.split_seed)


def write_corpus(split: CorpusSplit, out_dir) -> dict[str, int]:
    """Write train/valid/test JSON-Lines files; returns per-split counts."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in SPLIT_NAMES:
        with open(out_dir / f"{name}.jsonl", "w", encoding="utf-8") as handle:
            for example in getattr(split, name):
                record = {
                    "id": example.id,
                    "prompt": example.prompt,
                    "target": example.target,
                    "template_id": example.template_id,
                    "split": name,
                }
                handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    return split.counts()
