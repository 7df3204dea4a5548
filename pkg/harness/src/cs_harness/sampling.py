"""Mixed top-k / nucleus sampling."""

from __future__ import annotations

import torch
import torch.nn.functional as F


def filter_logits(logits: torch.Tensor, top_k: int = 5, top_p: float = 0.9) -> torch.Tensor:
    """Mask logits outside the top-k set and outside the smallest nucleus
    whose cumulative probability reaches top_p. 1-d input, returns a copy
    with excluded entries at -inf."""
    filtered = logits.clone()
    if top_k and top_k < filtered.shape[-1]:
        threshold = torch.topk(filtered, top_k).values[-1]
        filtered[filtered < threshold] = float("-inf")
    if top_p is not None and 0.0 < top_p < 1.0:
        sorted_logits, sorted_idx = torch.sort(filtered, descending=True)
        cumulative = torch.cumsum(F.softmax(sorted_logits, dim=-1), dim=-1)
        # drop tokens once the mass before them already reaches top_p; the
        # first token always survives
        drop = cumulative - F.softmax(sorted_logits, dim=-1) >= top_p
        filtered[sorted_idx[drop]] = float("-inf")
    return filtered


@torch.no_grad()
def generate(
    model,
    tokenizer,
    prompt: str,
    max_new_tokens: int = 64,
    top_k: int = 5,
    top_p: float = 0.9,
    generator: torch.Generator | None = None,
) -> str:
    """Sample a continuation of the prompt; returns the full generated text."""
    model.eval()
    ids = tokenizer.encode(prompt)
    ids = ids[-(model.cfg.max_seq - max_new_tokens) :]
    prompt_len = len(ids)
    sequence = torch.tensor([ids], dtype=torch.long)
    for _ in range(max_new_tokens):
        logits = model(sequence)[0, -1]
        filtered = filter_logits(logits, top_k, top_p)
        probs = F.softmax(filtered, dim=-1)
        next_id = int(torch.multinomial(probs, 1, generator=generator).item())
        sequence = torch.cat(
            [sequence, torch.tensor([[next_id]], dtype=torch.long)], dim=1
        )
        if next_id == tokenizer.eos_id:
            break
    continuation = tokenizer.decode(sequence[0, prompt_len:].tolist())
    if not continuation:
        return prompt
    if continuation.startswith((",", ";")):
        return prompt + continuation
    return prompt + " " + continuation
