"""Toy staged-training harness over cskit corpora."""

from .config import HarnessConfig
from .model import CausalLM, ModelConfig
from .tokenizer import Tokenizer
from .train import (
    generate_and_eval,
    load_checkpoint,
    perplexity,
    stage1_adapter_tune,
    stage2_two_way,
    stage3_dialogue,
)

__all__ = [
    "HarnessConfig",
    "CausalLM",
    "ModelConfig",
    "Tokenizer",
    "generate_and_eval",
    "load_checkpoint",
    "perplexity",
    "stage1_adapter_tune",
    "stage2_two_way",
    "stage3_dialogue",
]
