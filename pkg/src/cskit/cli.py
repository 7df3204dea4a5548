"""Command-line pipeline: load, walk, extract-commongen, extract-dialogues,
eval-triplets.

Every subcommand validates its configuration, writes a manifest.json with the
config hash and input digests into its output directory, and is idempotent
for a fixed config and seed. Partial skips (malformed rows, empty
extractions) never cause a nonzero exit; missing inputs do.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import dialogues as dialogues_mod
from . import extraction as extraction_mod
from . import metrics as metrics_mod
from .config import ConfigError, RunConfig, file_digest, write_manifest
from .embeddings import EmbeddingLoadError, load_embeddings
from .graph import (
    GraphLoadError,
    filter_graph,
    load_assertions,
    load_snapshot,
    save_snapshot,
)
from .walks import WalkConfig, generate_walks, walk_to_record


class CliError(Exception):
    pass


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="INI config file (flags override it)")
    parser.add_argument("--out", help="output directory (default: out)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--workers", type=int, help="parallel worker cap")


def _add_graph_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--snapshot", help="indexed graph snapshot from `load`")
    parser.add_argument("--graph", help="raw assertion dump")
    parser.add_argument("--embeddings", help="word vector file")
    parser.add_argument("--vocab-limit", type=int, dest="vocab_limit")
    parser.add_argument("--min-weight", type=float, dest="min_weight")
    parser.add_argument("--min-sim", type=float, dest="min_sim")
    parser.add_argument("--lang", help="language filter for dump rows")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cskit",
        description="Knowledge-graph corpus synthesis, extraction and evaluation.",
    )
    sub = parser.add_subparsers(dest="command")

    p_load = sub.add_parser("load", help="ingest + filter a dump, cache a snapshot")
    _add_common(p_load)
    _add_graph_inputs(p_load)
    p_load.set_defaults(func=cmd_load)

    p_walk = sub.add_parser("walk", help="generate walks and the prompted corpus")
    _add_common(p_walk)
    _add_graph_inputs(p_walk)
    p_walk.add_argument("--p", type=float, help="return parameter")
    p_walk.add_argument("--q", type=float, help="in-out parameter")
    p_walk.add_argument("--length", type=int, help="max walk length in concepts")
    p_walk.add_argument("--passes", type=int, help="traversals over all start concepts")
    p_walk.add_argument("--split-seed", type=int, dest="split_seed")
    p_walk.set_defaults(func=cmd_walk)

    p_cg = sub.add_parser("extract-commongen", help="two-way records from concept sets")
    _add_common(p_cg)
    _add_graph_inputs(p_cg)
    p_cg.add_argument("--dataset", help="concept-set JSON-Lines file")
    p_cg.add_argument("--pair-gate", type=float, dest="pair_gate")
    p_cg.add_argument("--middle-gate", type=float, dest="middle_gate")
    p_cg.set_defaults(func=cmd_extract_commongen)

    p_dlg = sub.add_parser("extract-dialogues", help="dialogue records with chains")
    _add_common(p_dlg)
    _add_graph_inputs(p_dlg)
    p_dlg.add_argument("--dataset", help="dialogues JSON file")
    p_dlg.add_argument("--pair-gate", type=float, dest="pair_gate")
    p_dlg.add_argument("--middle-gate", type=float, dest="middle_gate")
    p_dlg.add_argument("--keyword-k", type=int, dest="keyword_k")
    p_dlg.set_defaults(func=cmd_extract_dialogues)

    p_eval = sub.add_parser("eval-triplets", help="parse + score generation files")
    _add_common(p_eval)
    _add_graph_inputs(p_eval)
    p_eval.add_argument("--generations", help="one generation per line")
    p_eval.add_argument(
        "--either-direction",
        action="store_const",
        const=True,
        dest="either_direction",
        help="accept reversed assertions as exact matches",
    )
    p_eval.set_defaults(func=cmd_eval_triplets)

    return parser


def _build_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg.apply_file(args.config)
    overrides = {
        key: getattr(args, key)
        for key in cfg.to_dict()
        if hasattr(args, key) and getattr(args, key) is not None
    }
    cfg.apply_overrides(overrides)
    cfg.validate()
    return cfg


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require(cfg: RunConfig, name: str) -> str:
    value = cfg.resolve_path(getattr(cfg, name))
    if value is None:
        raise CliError(f"--{name.replace('_', '-')} is required for this command")
    if not Path(value).exists():
        raise CliError(f"input not found: {value}")
    return value


def _load_graph(cfg: RunConfig, need_store: bool, need_filtered: bool = True):
    """Graph via snapshot or dump(+embeddings); returns (graph, store, inputs, label)."""
    inputs = {}
    store = None
    if cfg.embeddings:
        path = _require(cfg, "embeddings")
        store = load_embeddings(path, cfg.vocab_limit)
        inputs["embeddings"] = path
    if cfg.snapshot:
        path = _require(cfg, "snapshot")
        graph, _ = load_snapshot(path)
        inputs["snapshot"] = path
        label = f"snapshot:{Path(path).name}"
    elif cfg.graph:
        path = _require(cfg, "graph")
        graph, _ = load_assertions(path, cfg.lang)
        inputs["graph"] = path
        label = f"dump:{Path(path).name}"
        if need_filtered:
            if store is None:
                raise CliError("--embeddings is required to filter a raw dump")
            graph, _ = filter_graph(graph, store, cfg.min_weight, cfg.min_sim)
            label += ":filtered"
    else:
        raise CliError("provide --snapshot or --graph")
    if need_store and store is None:
        raise CliError("--embeddings is required for this command")
    return graph, store, inputs, label


def cmd_load(args) -> int:
    cfg = _build_config(args)
    out = _out_dir(cfg)
    dump = _require(cfg, "graph")
    emb = _require(cfg, "embeddings")
    digest = file_digest(dump)
    snapshot_path = out / f"graph-{digest[:12]}-w{cfg.min_weight:g}-s{cfg.min_sim:g}.json.gz"

    if snapshot_path.exists():
        graph, meta = load_snapshot(snapshot_path)
        print(f"using cached snapshot {snapshot_path} ({len(graph)} assertions)")
        counts = meta.get("counts", {"kept": len(graph)})
    else:
        graph, load_report = load_assertions(dump, cfg.lang)
        store = load_embeddings(emb, cfg.vocab_limit)
        filtered, filter_report = filter_graph(graph, store, cfg.min_weight, cfg.min_sim)
        counts = {"load": load_report.to_dict(), "filter": filter_report.to_dict(), "kept": len(filtered)}
        save_snapshot(filtered, snapshot_path, meta={"source_sha256": digest, "counts": counts})
        with open(out / "load_report.json", "w", encoding="utf-8") as handle:
            json.dump(counts, handle, ensure_ascii=False, sort_keys=True, indent=2)
        print(load_report.summary())
        print(filter_report.summary())
        print(f"snapshot written to {snapshot_path}")

    write_manifest(out, "load", cfg, {"graph": dump, "embeddings": emb}, counts,
                   [snapshot_path.name])
    return 0


def cmd_walk(args) -> int:
    cfg = _build_config(args)
    out = _out_dir(cfg)
    graph, store, inputs, _ = _load_graph(cfg, need_store=False)
    walk_cfg = WalkConfig(cfg.p, cfg.q, cfg.length, cfg.passes, cfg.seed)

    eligible = sum(
        1
        for cid in range(len(graph.concepts))
        if any(
            (graph.assertions[aidx].sim_weight or 0) > 0
            for _, aidx, _ in graph.neighbor_entries(cid)
        )
    )
    walks = list(generate_walks(graph, store, walk_cfg, workers=cfg.workers))
    with open(out / "walks.jsonl", "w", encoding="utf-8") as handle:
        for walk in walks:
            handle.write(json.dumps(walk_to_record(walk), ensure_ascii=False, sort_keys=True) + "\n")

    split = corpus_mod.build_corpus(walks, cfg.effective_split_seed())
    counts = corpus_mod.write_corpus(split, out)
    counts.update({"walks": len(walks), "eligible_starts": eligible, "passes": cfg.passes})
    write_manifest(out, "walk", cfg, inputs, counts,
                   ["walks.jsonl", "train.jsonl", "valid.jsonl", "test.jsonl"])
    print(
        f"{len(walks)} walks ({cfg.passes} passes x {eligible} eligible starts) -> "
        f"train {counts['train']} / valid {counts['valid']} / test {counts['test']}"
    )
    return 0


def cmd_extract_commongen(args) -> int:
    cfg = _build_config(args)
    out = _out_dir(cfg)
    dataset = _require(cfg, "dataset")
    graph, store, inputs, _ = _load_graph(cfg, need_store=True)
    inputs["dataset"] = dataset

    records, stats = extraction_mod.build_two_way(
        extraction_mod.read_commongen_jsonl(dataset), graph, store,
        cfg.pair_gate, cfg.middle_gate,
    )
    with open(out / "records.jsonl", "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")
    with open(out / "stats.json", "w", encoding="utf-8") as handle:
        json.dump(stats.to_dict(), handle, ensure_ascii=False, sort_keys=True, indent=2)
    write_manifest(out, "extract-commongen", cfg, inputs, stats.to_dict(), ["records.jsonl", "stats.json"])
    line = f"{stats.pairs} triplet-sentence pairs, {stats.records} records"
    if stats.mean_triplets is not None:
        line += f", mean triplets {stats.mean_triplets:.2f}"
    print(line)
    return 0


def cmd_extract_dialogues(args) -> int:
    cfg = _build_config(args)
    out = _out_dir(cfg)
    dataset = _require(cfg, "dataset")
    graph, store, inputs, _ = _load_graph(cfg, need_store=True)
    inputs["dataset"] = dataset

    records, stats = dialogues_mod.build_records(
        dialogues_mod.read_dialogues(dataset), graph, store,
        k=cfg.keyword_k, pair_gate=cfg.pair_gate, middle_gate=cfg.middle_gate,
    )
    with open(out / "records.jsonl", "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(
                json.dumps(dialogues_mod.record_to_dict(record), ensure_ascii=False, sort_keys=True) + "\n"
            )
    with open(out / "stats.json", "w", encoding="utf-8") as handle:
        json.dump(stats.to_dict(), handle, ensure_ascii=False, sort_keys=True, indent=2)
    write_manifest(out, "extract-dialogues", cfg, inputs, stats.to_dict(), ["records.jsonl", "stats.json"])
    pct = stats.percentages()
    if pct is None:
        print(f"{stats.records} records, no chains extracted")
    else:
        print(
            f"{stats.records} records; chains: context-only {pct['context_only']:.2f}% / "
            f"context-response {pct['context_response']:.2f}% / both {pct['both_sides']:.2f}%"
        )
    return 0


def cmd_eval_triplets(args) -> int:
    cfg = _build_config(args)
    out = _out_dir(cfg)
    generations = _require(cfg, "generations")
    graph, _, inputs, label = _load_graph(cfg, need_store=False, need_filtered=False)
    inputs["generations"] = generations

    parsed = [metrics_mod.parse_chains(line) for line in metrics_mod.read_generations(generations)]
    report = metrics_mod.score(parsed, graph, cfg.either_direction, graph_label=label)
    payload = report.to_dict()
    payload["lines"] = len(parsed)
    payload["clean_lines"] = sum(1 for p in parsed if not p.errors and p.triplets)
    with open(out / "report.json", "w", encoding="utf-8") as handle:
        json.dump(payload, handle, ensure_ascii=False, sort_keys=True, indent=2)
    with open(out / "report.txt", "w", encoding="utf-8") as handle:
        handle.write(report.summary() + "\n")
    write_manifest(out, "eval-triplets", cfg, inputs, payload, ["report.json", "report.txt"])
    print(report.summary())
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except (CliError, ConfigError, GraphLoadError, EmbeddingLoadError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
