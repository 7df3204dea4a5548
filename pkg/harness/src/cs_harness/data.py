"""Readers for the corpus/record files and prompt handling.

The harness consumes only the JSON-Lines formats the pipeline CLI produces:
corpus splits ({"prompt", "target", ...}), two-way records
({"direction", "input", "target"}) and dialogue records
({"input", "target", "provenance", ...}).
"""

from __future__ import annotations

import json
import random
from pathlib import Path

SPECIAL_TOKEN = "<|commonsense|>"
USER_TOKEN = "[USER]"
SYSTEM_TOKEN = "[SYSTEM]"


def read_jsonl(path) -> list[dict]:
    rows = []
    with open(path, "rt", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                rows.append(json.loads(line))
    return rows


def load_corpus_split(corpus_dir, name: str) -> list[dict]:
    return read_jsonl(Path(corpus_dir) / f"{name}.jsonl")


def prompt_prefixes(target: str) -> list[str]:
    """The four training-prompt truncations, recomputed from chain text.

    Ends after: the first relation phrase; the first triplet (plus comma);
    the second relation phrase; the first two triplets (plus comma). The
    last two exist only when the chain has a second triplet.
    """
    closers = [i for i, ch in enumerate(target) if ch == "]"]
    commas = [i for i, ch in enumerate(target) if ch == ","]
    if not closers:
        return [target]
    prefixes = [target[: closers[0] + 1]]
    prefixes.append(target[: commas[0] + 1] if commas else target + ",")
    if len(closers) > 1:
        prefixes.append(target[: closers[1] + 1])
        prefixes.append(target[: commas[1] + 1] if len(commas) > 1 else target + ",")
    return prefixes


def sample_prompt(target: str, rng: random.Random) -> str:
    return f"{SPECIAL_TOKEN} {rng.choice(prompt_prefixes(target))}"


def encode_pair(tokenizer, prompt: str, full: str, max_seq: int) -> tuple[list[int], int]:
    """Token ids for the full text plus the length of its prompt prefix
    (loss-free positions)."""
    ids = tokenizer.encode(full, add_eos=True)[:max_seq]
    prompt_ids = tokenizer.encode(prompt)
    prompt_len = 0
    while (
        prompt_len < len(prompt_ids)
        and prompt_len < len(ids)
        and ids[prompt_len] == prompt_ids[prompt_len]
    ):
        prompt_len += 1
    return ids, prompt_len


def corpus_example(tokenizer, row: dict, max_seq: int, prompt: str | None = None):
    prompt = prompt if prompt is not None else row["prompt"]
    full = f"{SPECIAL_TOKEN} {row['target']}"
    return encode_pair(tokenizer, prompt, full, max_seq)


def record_example(tokenizer, row: dict, max_seq: int):
    full = f"{row['input']} {row['target']}"
    return encode_pair(tokenizer, row["input"], full, max_seq)
