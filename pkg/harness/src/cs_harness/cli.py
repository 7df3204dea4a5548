"""Thin CLI over the staged training and decoding entry points."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import HarnessConfig
from .data import read_jsonl
from .train import (
    generate_and_eval,
    stage1_adapter_tune,
    stage2_two_way,
    stage3_dialogue,
)


def _config(args) -> HarnessConfig:
    cfg = HarnessConfig()
    if args.config:
        cfg.apply_file(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


def _read_prompts(path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return [row["prompt"] for row in read_jsonl(path)]
    return [line for line in text.splitlines() if line.strip()]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cs-harness", description="Toy staged training harness.")
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--seed", type=int)
    sub = parser.add_subparsers(dest="command")

    p1 = sub.add_parser("stage1", help="adapter tuning on a walk corpus directory")
    p1.add_argument("--corpus", required=True)
    p1.add_argument("--out", required=True)

    p2 = sub.add_parser("stage2", help="two-way training on extracted records")
    p2.add_argument("--checkpoint", required=True)
    p2.add_argument("--records", required=True)
    p2.add_argument("--out", required=True)

    p3 = sub.add_parser("stage3", help="dialogue training with [USER]/[SYSTEM] tokens")
    p3.add_argument("--checkpoint", required=True)
    p3.add_argument("--records", required=True)
    p3.add_argument("--out", required=True)

    pg = sub.add_parser("generate", help="decode samples and score them")
    pg.add_argument("--checkpoint", required=True)
    pg.add_argument("--prompts", required=True, help="corpus JSONL or plain-text prompts")
    pg.add_argument("--out", required=True)
    pg.add_argument("--eval-graph", dest="eval_graph", help="dump or snapshot for eval-triplets")
    pg.add_argument("--heldout", help="corpus JSONL whose targets measure perplexity")

    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 2
    try:
        cfg = _config(args)
        if args.command == "stage1":
            metrics = stage1_adapter_tune(args.corpus, args.out, cfg)
        elif args.command == "stage2":
            metrics = stage2_two_way(args.checkpoint, args.records, args.out, cfg)
        elif args.command == "stage3":
            metrics = stage3_dialogue(args.checkpoint, args.records, args.out, cfg)
        else:
            heldout = None
            if args.heldout:
                heldout = [row["target"] for row in read_jsonl(args.heldout)]
            metrics = generate_and_eval(
                args.checkpoint, _read_prompts(args.prompts), args.out, cfg,
                eval_graph=args.eval_graph, heldout_texts=heldout,
            )
        print(json.dumps({k: v for k, v in metrics.items() if k != "triplet_report"},
                         sort_keys=True))
        return 0
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
