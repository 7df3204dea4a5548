"""Word-level tokenizer for chain and dialogue text.

Bracketed relation phrases ("[related to]") and marker tokens
("<|commonsense|>", "[USER]", "[SYSTEM]") are atomic; commas and semicolons
are their own tokens. Detokenization re-attaches punctuation without a
leading space, so chain text round-trips exactly.
"""

from __future__ import annotations

import json
import re

TOKEN_PATTERN = re.compile(r"\[[^\]]*\]|[,;]|[^\s,;]+")

PAD, UNK, EOS = "<pad>", "<unk>", "<eos>"


def split_text(text: str) -> list[str]:
    return TOKEN_PATTERN.findall(text)


def join_tokens(tokens: list[str]) -> str:
    out: list[str] = []
    for token in tokens:
        if token in (",", ";") or not out:
            out.append(token)
        else:
            out.append(" " + token)
    return "".join(out)


class Tokenizer:
    def __init__(self, vocab: list[str]):
        self.vocab = list(vocab)
        self.index = {token: i for i, token in enumerate(self.vocab)}
        if len(self.index) != len(self.vocab):
            raise ValueError("duplicate tokens in vocabulary")

    @classmethod
    def build(cls, texts) -> "Tokenizer":
        seen = set()
        for text in texts:
            seen.update(split_text(text))
        return cls([PAD, UNK, EOS] + sorted(seen))

    def __len__(self) -> int:
        return len(self.vocab)

    @property
    def pad_id(self) -> int:
        return self.index[PAD]

    @property
    def unk_id(self) -> int:
        return self.index[UNK]

    @property
    def eos_id(self) -> int:
        return self.index[EOS]

    def add_tokens(self, tokens) -> list[int]:
        """Append genuinely new tokens; returns their ids."""
        added = []
        for token in tokens:
            if token not in self.index:
                self.index[token] = len(self.vocab)
                self.vocab.append(token)
                added.append(self.index[token])
        return added

    def encode(self, text: str, add_eos: bool = False) -> list[int]:
        ids = [self.index.get(token, self.unk_id) for token in split_text(text)]
        if add_eos:
            ids.append(self.eos_id)
        return ids

    def decode(self, ids) -> str:
        tokens = []
        for i in ids:
            if i == self.eos_id:
                break
            if i == self.pad_id:
                continue
            tokens.append(self.vocab[i])
        return join_tokens(tokens)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump({"vocab": self.vocab}, handle, ensure_ascii=False)

    @classmethod
    def load(cls, path) -> "Tokenizer":
        with open(path, "rt", encoding="utf-8") as handle:
            return cls(json.load(handle)["vocab"])
