"""Harness configuration.

Stage defaults mirror the documented training recipe: batch sizes 64/16/16,
learning rate 5e-5, prompt re-sampling every 3 epochs, decoding with top-k 5
mixed with top-p 0.9 and 5 samples per prompt. Model-size and pre-training
knobs are desk-scale choices for the stand-in base model.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields


@dataclass
class HarnessConfig:
    # stand-in base model
    d_model: int = 64
    n_head: int = 2
    n_layer: int = 2
    d_ff: int = 256
    max_seq: int = 96
    pretrain_epochs: int = 12
    pretrain_lr: float = 1e-3
    pretrain_batch: int = 16
    # adapter tuning
    adapter_size: int = 16
    stage1_batch: int = 64
    stage1_lr: float = 5e-5
    stage1_epochs: int = 20
    stage2_batch: int = 16
    stage2_lr: float = 5e-5
    stage2_epochs: int = 1
    stage3_batch: int = 16
    stage3_lr: float = 5e-5
    stage3_epochs: int = 5
    resample_period: int = 3
    # decoding
    top_k: int = 5
    top_p: float = 0.9
    samples_per_prompt: int = 5
    max_new_tokens: int = 64
    seed: int = 0

    _INT = ("d_model", "n_head", "n_layer", "d_ff", "max_seq", "pretrain_epochs",
            "pretrain_batch", "adapter_size", "stage1_batch", "stage1_epochs",
            "stage2_batch", "stage2_epochs", "stage3_batch", "stage3_epochs",
            "resample_period", "top_k", "samples_per_prompt", "max_new_tokens", "seed")

    def apply_file(self, path) -> None:
        parser = configparser.ConfigParser()
        with open(path, "rt", encoding="utf-8") as handle:
            parser.read_string("[DEFAULT]\n" + handle.read())
        known = {f.name for f in fields(self)}
        for section in [parser.defaults()] + [parser[s] for s in parser.sections()]:
            for key, value in section.items():
                name = key.replace("-", "_")
                if name not in known:
                    raise ValueError(f"unknown config key: {key}")
                setattr(self, name, int(value) if name in self._INT else float(value))

    def apply_overrides(self, overrides: dict) -> None:
        for key, value in overrides.items():
            if value is not None:
                setattr(self, key, value)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
