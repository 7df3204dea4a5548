"""Small causal transformer LM with optional bottleneck adapters.

The adapters sit after the attention and feed-forward sublayers (two per
block), each a residual down-project/ReLU/up-project with the up projection
zero-initialized so training starts from the base model's behavior. The
token embedding is tied to the output head, so "new token rows" means rows
of one table.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import torch
import torch.nn.functional as F
from torch import nn


@dataclass
class ModelConfig:
    vocab_size: int
    d_model: int = 64
    n_head: int = 2
    n_layer: int = 2
    d_ff: int = 256
    max_seq: int = 96

    def to_dict(self) -> dict:
        return asdict(self)


class Adapter(nn.Module):
    def __init__(self, d_model: int, bottleneck: int):
        super().__init__()
        self.down = nn.Linear(d_model, bottleneck)
        self.up = nn.Linear(bottleneck, d_model)
        nn.init.normal_(self.down.weight, std=0.02)
        nn.init.zeros_(self.down.bias)
        nn.init.zeros_(self.up.weight)
        nn.init.zeros_(self.up.bias)

    def forward(self, x):
        return x + self.up(F.relu(self.down(x)))


class CausalSelfAttention(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        assert cfg.d_model % cfg.n_head == 0
        self.n_head = cfg.n_head
        self.qkv = nn.Linear(cfg.d_model, 3 * cfg.d_model)
        self.proj = nn.Linear(cfg.d_model, cfg.d_model)

    def forward(self, x):
        b, t, d = x.shape
        q, k, v = self.qkv(x).split(d, dim=2)
        shape = (b, t, self.n_head, d // self.n_head)
        q = q.view(shape).transpose(1, 2)
        k = k.view(shape).transpose(1, 2)
        v = v.view(shape).transpose(1, 2)
        out = F.scaled_dot_product_attention(q, k, v, is_causal=True)
        return self.proj(out.transpose(1, 2).reshape(b, t, d))


class Block(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.ln1 = nn.LayerNorm(cfg.d_model)
        self.attn = CausalSelfAttention(cfg)
        self.ln2 = nn.LayerNorm(cfg.d_model)
        self.mlp = nn.Sequential(
            nn.Linear(cfg.d_model, cfg.d_ff),
            nn.GELU(),
            nn.Linear(cfg.d_ff, cfg.d_model),
        )
        self.adapter_attn: Adapter | None = None
        self.adapter_mlp: Adapter | None = None

    def forward(self, x):
        h = self.attn(self.ln1(x))
        if self.adapter_attn is not None:
            h = self.adapter_attn(h)
        x = x + h
        h = self.mlp(self.ln2(x))
        if self.adapter_mlp is not None:
            h = self.adapter_mlp(h)
        return x + h


class CausalLM(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        self.tok_emb = nn.Embedding(cfg.vocab_size, cfg.d_model)
        self.pos_emb = nn.Embedding(cfg.max_seq, cfg.d_model)
        self.blocks = nn.ModuleList(Block(cfg) for _ in range(cfg.n_layer))
        self.ln_f = nn.LayerNorm(cfg.d_model)
        nn.init.normal_(self.tok_emb.weight, std=0.02)
        nn.init.normal_(self.pos_emb.weight, std=0.02)
        self._freeze_handles: list = []

    def forward(self, ids):
        b, t = ids.shape
        if t > self.cfg.max_seq:
            raise ValueError(f"sequence length {t} exceeds max_seq {self.cfg.max_seq}")
        positions = torch.arange(t, device=ids.device)
        x = self.tok_emb(ids) + self.pos_emb(positions)[None, :, :]
        for block in self.blocks:
            x = block(x)
        x = self.ln_f(x)
        # tied output head
        return F.linear(x, self.tok_emb.weight)

    # -- staged-training machinery ------------------------------------------

    def resize_vocab(self, new_size: int) -> None:
        """Grow the tied embedding; new rows start at the mean of the old."""
        old = self.tok_emb.weight.data
        if new_size < old.shape[0]:
            raise ValueError("vocabulary can only grow")
        if new_size == old.shape[0]:
            return
        emb = nn.Embedding(new_size, self.cfg.d_model)
        emb.weight.data[: old.shape[0]] = old
        emb.weight.data[old.shape[0] :] = old.mean(dim=0)
        self.tok_emb = emb
        self.cfg.vocab_size = new_size

    def add_adapters(self, bottleneck: int) -> None:
        for block in self.blocks:
            block.adapter_attn = Adapter(self.cfg.d_model, bottleneck)
            block.adapter_mlp = Adapter(self.cfg.d_model, bottleneck)

    def base_parameter_names(self) -> list[str]:
        return [n for n, _ in self.named_parameters() if "adapter" not in n]

    def freeze_base(self, base_vocab_size: int) -> None:
        """Train adapters and the embedding rows of tokens added after
        base_vocab_size; everything else is frozen (old rows bit-exact)."""
        self.unfreeze_all()
        for name, param in self.named_parameters():
            param.requires_grad_("adapter" in name or name == "tok_emb.weight")

        def mask_old_rows(grad):
            grad = grad.clone()
            grad[:base_vocab_size] = 0
            return grad

        self._freeze_handles.append(self.tok_emb.weight.register_hook(mask_old_rows))

    def unfreeze_all(self) -> None:
        for handle in self._freeze_handles:
            handle.remove()
        self._freeze_handles = []
        for param in self.parameters():
            param.requires_grad_(True)

    def trainable_parameters(self):
        return [p for p in self.parameters() if p.requires_grad]


def lm_loss(model: CausalLM, ids: torch.Tensor, pad_id: int, prompt_lengths=None):
    """Next-token cross entropy; pad positions and (optionally) prompt
    positions carry no loss. Returns (mean loss, token count)."""
    logits = model(ids)[:, :-1]
    targets = ids[:, 1:]
    mask = targets != pad_id
    if prompt_lengths is not None:
        positions = torch.arange(targets.shape[1], device=ids.device)[None, :]
        # target at index i is the token at position i+1: it is "inside the
        # prompt" while i+1 < prompt_length
        mask = mask & (positions + 1 >= prompt_lengths[:, None])
    flat_loss = F.cross_entropy(
        logits.reshape(-1, logits.shape[-1]), targets.reshape(-1), reduction="none"
    )
    flat_mask = mask.reshape(-1).float()
    count = flat_mask.sum().clamp(min=1.0)
    return (flat_loss * flat_mask).sum() / count, int(flat_mask.sum().item())
