"""Staged training: base pre-training, adapter tuning, two-way, dialogue.

The stand-in for a pre-trained conversational model is a small causal LM
pre-trained here on the plain chain text (all parameters). Stage 1 then adds
the commonsense marker token and bottleneck adapters and trains only those;
stages 2 and 3 unfreeze everything, stage 3 after adding the [USER] and
[SYSTEM] tokens.
"""

from __future__ import annotations

import json
import math
import random
import subprocess
import sys
from pathlib import Path

import torch

from .config import HarnessConfig
from .data import (
    SPECIAL_TOKEN,
    SYSTEM_TOKEN,
    USER_TOKEN,
    corpus_example,
    load_corpus_split,
    read_jsonl,
    record_example,
    sample_prompt,
)
from .model import CausalLM, ModelConfig, lm_loss
from .sampling import generate
from .tokenizer import Tokenizer


def _pad_batch(items, pad_id):
    longest = max(len(ids) for ids, _ in items)
    batch = torch.full((len(items), longest), pad_id, dtype=torch.long)
    for i, (ids, _) in enumerate(items):
        batch[i, : len(ids)] = torch.tensor(ids, dtype=torch.long)
    prompt_lens = torch.tensor([p for _, p in items], dtype=torch.long)
    return batch, prompt_lens


def _train_epochs(model, examples_fn, epochs, batch_size, lr, pad_id, seed) -> list[float]:
    """Adam over shuffled batches; returns token-weighted mean loss per epoch."""
    optimizer = torch.optim.Adam(model.trainable_parameters(), lr=lr)
    epoch_losses = []
    for epoch in range(epochs):
        model.train()
        examples = list(examples_fn(epoch))
        rng = random.Random(seed * 100_003 + epoch)
        rng.shuffle(examples)
        total, tokens = 0.0, 0
        for i in range(0, len(examples), batch_size):
            batch, prompt_lens = _pad_batch(examples[i : i + batch_size], pad_id)
            loss, count = lm_loss(model, batch, pad_id, prompt_lens)
            if count == 0:
                continue
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += loss.item() * count
            tokens += count
        epoch_losses.append(total / max(tokens, 1))
    return epoch_losses


def save_checkpoint(path, model: CausalLM, tokenizer: Tokenizer, meta: dict) -> None:
    payload = {
        "model_cfg": model.cfg.to_dict(),
        "state_dict": model.state_dict(),
        "vocab": tokenizer.vocab,
        "meta": meta,
    }
    torch.save(payload, path)


def load_checkpoint(path) -> tuple[CausalLM, Tokenizer, dict]:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    cfg = ModelConfig(**payload["model_cfg"])
    model = CausalLM(cfg)
    adapter_keys = [k for k in payload["state_dict"] if "adapter_attn.down.weight" in k]
    if adapter_keys:
        bottleneck = payload["state_dict"][adapter_keys[0]].shape[0]
        model.add_adapters(bottleneck)
    model.load_state_dict(payload["state_dict"])
    return model, Tokenizer(payload["vocab"]), payload["meta"]


def _snapshot(model: CausalLM) -> dict[str, torch.Tensor]:
    return {n: p.detach().clone() for n, p in model.named_parameters() if "adapter" not in n}


def _base_frozen(model: CausalLM, before: dict, base_vocab_size: int) -> bool:
    """Bit-exact base check; only embedding rows past base_vocab_size may move."""
    for name, param in model.named_parameters():
        if "adapter" in name:
            continue
        old = before[name]
        if name == "tok_emb.weight":
            if not torch.equal(param.detach()[:base_vocab_size], old[:base_vocab_size]):
                return False
        elif not torch.equal(param.detach(), old):
            return False
    return True


def stage1_adapter_tune(corpus_dir, out_dir, cfg: HarnessConfig | None = None) -> dict:
    """Pre-train the stand-in base on plain chain text, then freeze it, add
    the marker token + adapters, and tune on the prompted corpus."""
    cfg = cfg or HarnessConfig()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(cfg.seed)

    train_rows = load_corpus_split(corpus_dir, "train")
    if not train_rows:
        raise ValueError(f"no training rows under {corpus_dir}")
    targets = [row["target"] for row in train_rows]
    tokenizer = Tokenizer.build(targets)

    model = CausalLM(
        ModelConfig(
            vocab_size=len(tokenizer),
            d_model=cfg.d_model,
            n_head=cfg.n_head,
            n_layer=cfg.n_layer,
            d_ff=cfg.d_ff,
            max_seq=cfg.max_seq,
        )
    )
    pretrain_losses = _train_epochs(
        model,
        lambda _: [
            (tokenizer.encode(t, add_eos=True)[: cfg.max_seq], 0) for t in targets
        ],
        cfg.pretrain_epochs,
        cfg.pretrain_batch,
        cfg.pretrain_lr,
        tokenizer.pad_id,
        cfg.seed,
    )

    base_vocab_size = len(tokenizer)
    base_before = _snapshot(model)
    tokenizer.add_tokens([SPECIAL_TOKEN])
    model.resize_vocab(len(tokenizer))
    model.add_adapters(cfg.adapter_size)
    model.freeze_base(base_vocab_size)
    # the snapshot predates the resize; compare against the original rows
    base_before["tok_emb.weight"] = base_before["tok_emb.weight"][:base_vocab_size]

    def stage_examples(epoch: int):
        # file prompts for the first resample_period epochs, then a fresh
        # template draw per example every resample_period epochs
        period = epoch // cfg.resample_period if cfg.resample_period > 0 else 0
        if period == 0:
            return [corpus_example(tokenizer, row, cfg.max_seq) for row in train_rows]
        rng = random.Random(cfg.seed * 7919 + period)
        return [
            corpus_example(
                tokenizer, row, cfg.max_seq, prompt=sample_prompt(row["target"], rng)
            )
            for row in train_rows
        ]

    epoch_losses = _train_epochs(
        model, stage_examples, cfg.stage1_epochs, cfg.stage1_batch,
        cfg.stage1_lr, tokenizer.pad_id, cfg.seed + 1,
    )

    frozen = _base_frozen(model, base_before, base_vocab_size)

    checkpoint = out_dir / "stage1.pt"
    meta = {"stage": "stage1", "base_vocab_size": base_vocab_size, "harness_cfg": cfg.to_dict()}
    save_checkpoint(checkpoint, model, tokenizer, meta)

    metrics = {
        "stage": "stage1",
        "pretrain_losses": pretrain_losses,
        "epoch_losses": epoch_losses,
        "base_frozen": frozen,
        "new_token_rows": len(tokenizer) - base_vocab_size,
        "trainable_parameters": sum(p.numel() for p in model.trainable_parameters()),
        "checkpoint": str(checkpoint),
    }
    with open(out_dir / "metrics.json", "w", encoding="utf-8") as handle:
        json.dump(metrics, handle, ensure_ascii=False, sort_keys=True, indent=2)
    return metrics


def _continue_training(checkpoint_path, rows, out_dir, cfg, stage, epochs, batch, lr,
                       new_tokens=()) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(cfg.seed)
    model, tokenizer, meta = load_checkpoint(checkpoint_path)
    if new_tokens:
        tokenizer.add_tokens(list(new_tokens))
        model.resize_vocab(len(tokenizer))
    model.unfreeze_all()

    examples = [record_example(tokenizer, row, cfg.max_seq) for row in rows]
    epoch_losses = _train_epochs(
        model, lambda _: examples, epochs, batch, lr, tokenizer.pad_id, cfg.seed + 2
    )

    checkpoint = out_dir / f"{stage}.pt"
    meta = dict(meta, stage=stage)
    save_checkpoint(checkpoint, model, tokenizer, meta)
    metrics = {"stage": stage, "epoch_losses": epoch_losses, "checkpoint": str(checkpoint)}
    with open(out_dir / "metrics.json", "w", encoding="utf-8") as handle:
        json.dump(metrics, handle, ensure_ascii=False, sort_keys=True, indent=2)
    return metrics


def stage2_two_way(checkpoint_path, records_path, out_dir, cfg: HarnessConfig | None = None) -> dict:
    """All parameters unfrozen; trains on both record directions."""
    cfg = cfg or HarnessConfig()
    rows = read_jsonl(records_path)
    return _continue_training(
        checkpoint_path, rows, out_dir, cfg, "stage2",
        cfg.stage2_epochs, cfg.stage2_batch, cfg.stage2_lr,
    )


def stage3_dialogue(checkpoint_path, records_path, out_dir, cfg: HarnessConfig | None = None) -> dict:
    """Adds the [USER]/[SYSTEM] tokens, then continues full training."""
    cfg = cfg or HarnessConfig()
    rows = read_jsonl(records_path)
    return _continue_training(
        checkpoint_path, rows, out_dir, cfg, "stage3",
        cfg.stage3_epochs, cfg.stage3_batch, cfg.stage3_lr,
        new_tokens=(USER_TOKEN, SYSTEM_TOKEN),
    )


def perplexity(model: CausalLM, tokenizer: Tokenizer, texts, max_seq: int) -> float:
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for text in texts:
            ids = tokenizer.encode(text, add_eos=True)[:max_seq]
            if len(ids) < 2:
                continue
            batch = torch.tensor([ids], dtype=torch.long)
            loss, tokens = lm_loss(model, batch, tokenizer.pad_id)
            total += loss.item() * tokens
            count += tokens
    return math.exp(total / count) if count else float("inf")


def generate_and_eval(
    checkpoint_path,
    prompts,
    out_dir,
    cfg: HarnessConfig | None = None,
    eval_graph=None,
    heldout_texts=None,
) -> dict:
    """Decode samples for every prompt, score them with the pipeline CLI and
    measure held-out perplexity. One generation per output line."""
    cfg = cfg or HarnessConfig()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model, tokenizer, _ = load_checkpoint(checkpoint_path)
    generator = torch.Generator().manual_seed(cfg.seed)

    lines = []
    for prompt in prompts:
        for _ in range(cfg.samples_per_prompt):
            lines.append(
                generate(
                    model, tokenizer, prompt,
                    max_new_tokens=cfg.max_new_tokens,
                    top_k=cfg.top_k, top_p=cfg.top_p,
                    generator=generator,
                )
            )
    generations_path = out_dir / "generations.txt"
    generations_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    metrics: dict = {"generations": len(lines), "generations_file": str(generations_path)}

    if heldout_texts:
        metrics["perplexity"] = perplexity(model, tokenizer, heldout_texts, cfg.max_seq)

    if eval_graph is not None:
        eval_dir = out_dir / "eval"
        flag = "--snapshot" if str(eval_graph).endswith((".json.gz", ".json")) else "--graph"
        result = subprocess.run(
            [sys.executable, "-m", "cskit.cli", "eval-triplets",
             flag, str(eval_graph), "--generations", str(generations_path),
             "--out", str(eval_dir)],
            capture_output=True, text=True,
        )
        if result.returncode != 0:
            raise RuntimeError(f"triplet evaluation failed: {result.stderr.strip()}")
        with open(eval_dir / "report.json", "rt", encoding="utf-8") as handle:
            report = json.load(handle)
        segments = report["total"] + report["unparsed"]
        metrics["segment_parse_rate"] = report["total"] / segments if segments else 0.0
        # fraction of generations that parse with zero errors
        metrics["parse_rate"] = report["clean_lines"] / report["lines"] if report["lines"] else 0.0
        metrics["triplet_report"] = report

    with open(out_dir / "metrics.json", "w", encoding="utf-8") as handle:
        json.dump(metrics, handle, ensure_ascii=False, sort_keys=True, indent=2)
    return metrics
