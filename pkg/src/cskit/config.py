"""Run configuration: defaults, INI config files, env and CLI overrides.

Defaults follow the documented recipe: walk parameters p=2.0, q=1.5,
length=10, passes=2; filter thresholds weight >= 1 and cosine >= 0;
extraction gates 0.3 (pair) and 0.5 (middle); 80/10/10 split.

Precedence: built-in defaults < config file < command-line flags. Relative
input paths that do not exist are retried under $CSKIT_DATA_DIR.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

DATA_DIR_ENV = "CSKIT_DATA_DIR"


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    graph: str | None = None
    embeddings: str | None = None
    snapshot: str | None = None
    dataset: str | None = None
    generations: str | None = None
    out: str = "out"
    lang: str = "en"
    vocab_limit: int | None = None
    min_weight: float = 1.0
    min_sim: float = 0.0
    p: float = 2.0
    q: float = 1.5
    length: int = 10
    passes: int = 2
    seed: int = 0
    split_seed: int | None = None
    pair_gate: float = 0.3
    middle_gate: float = 0.5
    keyword_k: int = 5
    workers: int = 1
    either_direction: bool = False

    _COERCE = {
        "vocab_limit": int,
        "min_weight": float,
        "min_sim": float,
        "p": float,
        "q": float,
        "length": int,
        "passes": int,
        "seed": int,
        "split_seed": int,
        "pair_gate": float,
        "middle_gate": float,
        "keyword_k": int,
        "workers": int,
        "either_direction": lambda v: str(v).strip().lower() in ("1", "true", "yes", "on"),
    }

    def validate(self) -> None:
        if self.p <= 0 or self.q <= 0:
            raise ConfigError("p and q must be positive")
        if self.length < 2:
            raise ConfigError("length must be at least 2")
        if self.passes < 1:
            raise ConfigError("passes must be at least 1")
        if not (0.0 <= self.pair_gate <= 1.0 and 0.0 <= self.middle_gate <= 1.0):
            raise ConfigError("extraction gates must be within [0, 1]")
        if self.min_weight < 0:
            raise ConfigError("min_weight must be non-negative")
        if not (-1.0 <= self.min_sim <= 1.0):
            raise ConfigError("min_sim must be within [-1, 1]")
        if self.keyword_k < 1:
            raise ConfigError("keyword_k must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.vocab_limit is not None and self.vocab_limit < 1:
            raise ConfigError("vocab_limit must be at least 1")

    def effective_split_seed(self) -> int:
        return self.seed if self.split_seed is None else self.split_seed

    def apply_file(self, path) -> None:
        """Read a flat key=value INI file; section names are organizational."""
        parser = configparser.ConfigParser()
        try:
            with open(path, "rt", encoding="utf-8") as handle:
                parser.read_string("[DEFAULT]\n" + handle.read())
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        known = {f.name for f in fields(self) if not f.name.startswith("_")}
        for section in [parser.defaults()] + [parser[s] for s in parser.sections()]:
            for key, value in section.items():
                name = key.replace("-", "_")
                if name not in known:
                    raise ConfigError(f"unknown config key: {key}")
                coerce = self._COERCE.get(name, str)
                try:
                    setattr(self, name, coerce(value))
                except ValueError as exc:
                    raise ConfigError(f"bad value for {key}: {value}") from exc

    def apply_overrides(self, overrides: dict) -> None:
        for key, value in overrides.items():
            if value is not None:
                setattr(self, key, value)

    def resolve_path(self, path: str | None) -> str | None:
        """Existing paths win; otherwise retry relative paths under the data
        directory from the environment."""
        if path is None:
            return None
        candidate = Path(path)
        if candidate.exists() or candidate.is_absolute():
            return str(candidate)
        data_dir = os.environ.get(DATA_DIR_ENV)
        if data_dir:
            under = Path(data_dir) / candidate
            if under.exists():
                return str(under)
        return str(candidate)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if not f.name.startswith("_")}


def config_hash(cfg: RunConfig) -> str:
    payload = json.dumps(cfg.to_dict(), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def file_digest(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(out_dir, command: str, cfg: RunConfig, inputs: dict, counts: dict, outputs: list[str]) -> Path:
    """Reproducibility record: config hash, input digests and counts."""
    manifest = {
        "command": command,
        "config": cfg.to_dict(),
        "config_hash": config_hash(cfg),
        "inputs": {
            name: {"path": str(path), "sha256": file_digest(path)}
            for name, path in inputs.items()
        },
        "counts": counts,
        "outputs": sorted(outputs),
    }
    path = Path(out_dir) / "manifest.json"
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, ensure_ascii=False, sort_keys=True, indent=2)
        handle.write("\n")
    return path
