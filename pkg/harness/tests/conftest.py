import subprocess
import sys

import pytest

from cs_harness.config import HarnessConfig


def toy_config(**overrides) -> HarnessConfig:
    """Desk-scale settings that memorize the toy corpus in seconds."""
    cfg = HarnessConfig(
        pretrain_epochs=30,
        pretrain_lr=1e-3,
        pretrain_batch=16,
        stage1_epochs=60,
        stage1_lr=3e-3,
        stage1_batch=16,
        adapter_size=32,
        max_new_tokens=64,
        seed=0,
    )
    cfg.apply_overrides(overrides)
    return cfg


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory):
    """200-walk corpus built by the pipeline CLI over a 100-concept cycle."""
    root = tmp_path_factory.mktemp("toy")
    dump = root / "dump.tsv"
    dump.write_text(
        "".join(f"c{i}\tRelatedTo\tc{(i + 1) % 100}\t1.0\n" for i in range(100)),
        encoding="utf-8",
    )
    vectors = root / "vectors.txt"
    vectors.write_text(
        "".join(f"c{i} 1.0 0.0\n" for i in range(100)), encoding="utf-8"
    )
    corpus = root / "corpus"
    result = subprocess.run(
        [sys.executable, "-m", "cskit.cli", "walk",
         "--graph", str(dump), "--embeddings", str(vectors),
         "--out", str(corpus), "--seed", "5"],
        capture_output=True, text=True,
    )
    assert result.returncode == 0, result.stderr
    return {"root": root, "corpus": corpus, "dump": dump}
