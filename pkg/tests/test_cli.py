import json

import pytest

from cskit.cli import main

from conftest import COMMONGEN_ANGLES, COMMONGEN_ROWS, unit
from test_metrics import SCORE_ROWS, SEVEN_OF_TEN_LINES

WALK_ROWS = [
    ("autobraking", "RelatedTo", "automatic", 1.0),
    ("automatic", "DerivedFrom", "auto", 1.2),
    ("auto", "RelatedTo", "automobile", 1.4),
    ("automobile", "RelatedTo", "car", 2.0),
    ("car", "UsedFor", "drive", 1.1),
]

WALK_ANGLES = {
    "autobraking": 0.0,
    "automatic": 10.0,
    "auto": 20.0,
    "automobile": 30.0,
    "car": 40.0,
    "drive": 50.0,
}


def write_dump(path, rows):
    path.write_text(
        "".join(f"{h}\t{r}\t{t}\t{w}\n" for h, r, t, w in rows), encoding="utf-8"
    )
    return path


def write_embeddings(path, angles):
    lines = []
    for token, deg in angles.items():
        v = unit(deg)
        lines.append(f"{token} {float(v[0])!r} {float(v[1])!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def walk_inputs(tmp_path):
    dump = write_dump(tmp_path / "dump.tsv", WALK_ROWS)
    vectors = write_embeddings(tmp_path / "vectors.txt", WALK_ANGLES)
    return dump, vectors


def read_outputs(out_dir, names):
    return {name: (out_dir / name).read_bytes() for name in names}


class TestLoad:
    def test_load_writes_snapshot_and_manifest(self, tmp_path, walk_inputs, capsys):
        dump, vectors = walk_inputs
        out = tmp_path / "loaded"
        code = main(["load", "--graph", str(dump), "--embeddings", str(vectors), "--out", str(out)])
        assert code == 0
        assert "loaded 5 assertions" in capsys.readouterr().out
        snapshots = list(out.glob("graph-*.json.gz"))
        assert len(snapshots) == 1
        manifest = json.loads((out / "manifest.json").read_text("utf-8"))
        assert manifest["command"] == "load"
        assert set(manifest["inputs"]) == {"graph", "embeddings"}
        for entry in manifest["inputs"].values():
            assert len(entry["sha256"]) == 64

    def test_second_load_reuses_the_cached_snapshot(self, tmp_path, walk_inputs, capsys):
        dump, vectors = walk_inputs
        out = tmp_path / "loaded"
        assert main(["load", "--graph", str(dump), "--embeddings", str(vectors), "--out", str(out)]) == 0
        capsys.readouterr()
        assert main(["load", "--graph", str(dump), "--embeddings", str(vectors), "--out", str(out)]) == 0
        assert "using cached snapshot" in capsys.readouterr().out


class TestWalk:
    FILES = ["walks.jsonl", "train.jsonl", "valid.jsonl", "test.jsonl", "manifest.json"]

    def run(self, dump, vectors, out, extra=()):
        return main(
            ["walk", "--graph", str(dump), "--embeddings", str(vectors),
             "--out", str(out), "--seed", "7", *extra]
        )

    def test_two_runs_are_byte_identical(self, tmp_path, walk_inputs):
        dump, vectors = walk_inputs
        out = tmp_path / "corpus"
        assert self.run(dump, vectors, out) == 0
        first = read_outputs(out, self.FILES)
        assert self.run(dump, vectors, out) == 0
        assert read_outputs(out, self.FILES) == first

    def test_walk_count_matches_eligible_starts(self, tmp_path, walk_inputs):
        dump, vectors = walk_inputs
        out = tmp_path / "corpus"
        assert self.run(dump, vectors, out) == 0
        manifest = json.loads((out / "manifest.json").read_text("utf-8"))
        counts = manifest["counts"]
        assert counts["walks"] == counts["passes"] * counts["eligible_starts"]
        assert counts["walks"] == counts["train"] + counts["valid"] + counts["test"]

    def test_walk_from_snapshot_needs_no_embeddings(self, tmp_path, walk_inputs):
        dump, vectors = walk_inputs
        loaded = tmp_path / "loaded"
        assert main(["load", "--graph", str(dump), "--embeddings", str(vectors), "--out", str(loaded)]) == 0
        snapshot = next(loaded.glob("graph-*.json.gz"))
        out = tmp_path / "corpus"
        assert main(["walk", "--snapshot", str(snapshot), "--out", str(out), "--seed", "7"]) == 0
        assert (out / "train.jsonl").exists()

    def test_worker_count_does_not_change_output(self, tmp_path, walk_inputs):
        dump, vectors = walk_inputs
        serial = tmp_path / "serial"
        threaded = tmp_path / "threaded"
        assert self.run(dump, vectors, serial) == 0
        assert self.run(dump, vectors, threaded, extra=["--workers", "4"]) == 0
        for name in ["walks.jsonl", "train.jsonl", "valid.jsonl", "test.jsonl"]:
            assert (serial / name).read_bytes() == (threaded / name).read_bytes()

    def test_config_file_with_cli_override(self, tmp_path, walk_inputs):
        dump, vectors = walk_inputs
        config = tmp_path / "run.ini"
        config.write_text("[walk]\npasses = 1\nlength = 4\n", encoding="utf-8")
        out = tmp_path / "corpus"
        code = main(
            ["walk", "--config", str(config), "--graph", str(dump),
             "--embeddings", str(vectors), "--out", str(out), "--passes", "2"]
        )
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text("utf-8"))
        assert manifest["config"]["passes"] == 2  # flag beats file
        assert manifest["config"]["length"] == 4  # file beats default


class TestExtractCommongen:
    def test_reference_dataset_statistics(self, tmp_path, capsys):
        dump = write_dump(tmp_path / "dump.tsv", COMMONGEN_ROWS)
        vectors = write_embeddings(tmp_path / "vectors.txt", COMMONGEN_ANGLES)
        dataset = tmp_path / "commongen.jsonl"
        with open(dataset, "w", encoding="utf-8") as handle:
            handle.write(json.dumps({"concepts": ["ocean", "surfer", "surf"],
                                     "sentences": ["The ocean is where surfers go to surf."]}) + "\n")
            handle.write(json.dumps({"concepts": ["table", "burger", "eat"],
                                     "sentences": ["They eat burgers at the dinner table."]}) + "\n")
        out = tmp_path / "twoway"
        code = main(
            ["extract-commongen", "--graph", str(dump), "--embeddings", str(vectors),
             "--dataset", str(dataset), "--out", str(out)]
        )
        assert code == 0
        printed = capsys.readouterr().out
        assert "2 triplet-sentence pairs" in printed
        assert "mean triplets 3.00" in printed
        rows = [json.loads(line) for line in (out / "records.jsonl").read_text("utf-8").splitlines()]
        assert len(rows) == 4
        assert {row["direction"] for row in rows} == {"cs_to_sentence", "sentence_to_cs"}
        stats = json.loads((out / "stats.json").read_text("utf-8"))
        assert stats["pairs"] == 2 and stats["mean_triplets"] == 3.0


class TestExtractDialogues:
    def test_reference_dialogue_run(self, tmp_path, capsys):
        rows = [
            ("diet", "HasSubevent", "lose weight", 1.0),
            ("diet", "RelatedTo", "food", 1.0),
            ("food", "HasProperty", "healthy", 1.0),
            ("diet", "RelatedTo", "eat", 1.0),
        ]
        angles = {"diet": 0.0, "food": 20.0, "healthy": 40.0, "eat": -20.0,
                  "lose": 60.0, "weight": 80.0}
        dump = write_dump(tmp_path / "dump.tsv", rows)
        vectors = write_embeddings(tmp_path / "vectors.txt", angles)
        dataset = tmp_path / "dialogues.json"
        dataset.write_text(
            json.dumps({"1": {"turns": ["I'm on a diet to lose weight.",
                                        "Don't forget to eat more healthy."]}}),
            encoding="utf-8",
        )
        out = tmp_path / "dlg"
        code = main(
            ["extract-dialogues", "--graph", str(dump), "--embeddings", str(vectors),
             "--dataset", str(dataset), "--out", str(out)]
        )
        assert code == 0
        printed = capsys.readouterr().out
        assert "context-only 33.33%" in printed
        assert "context-response 66.67%" in printed
        rows_out = [json.loads(line) for line in (out / "records.jsonl").read_text("utf-8").splitlines()]
        assert len(rows_out) == 1
        assert "diet [has subevent of] lose weight" in rows_out[0]["target"]


class TestEvalTriplets:
    def test_reference_scores_printed(self, tmp_path, capsys):
        dump = write_dump(tmp_path / "dump.tsv", [(h, r, t, w) for h, r, t, w in SCORE_ROWS])
        generations = tmp_path / "generations.txt"
        generations.write_text("\n".join(SEVEN_OF_TEN_LINES) + "\n", encoding="utf-8")
        out = tmp_path / "eval"
        code = main(
            ["eval-triplets", "--graph", str(dump), "--generations", str(generations),
             "--out", str(out)]
        )
        assert code == 0
        printed = capsys.readouterr().out
        assert "70.00%" in printed and "40.00%" in printed
        report = json.loads((out / "report.json").read_text("utf-8"))
        assert report["total"] == 10 and report["pair_hits"] == 7 and report["assertion_hits"] == 4
        assert report["lines"] == 2 and report["clean_lines"] == 2
        assert (out / "report.txt").read_text("utf-8").startswith("concepts accuracy 70.00%")


class TestFailureModes:
    def test_missing_input_fails_with_diagnostic(self, tmp_path, capsys):
        code = main(["walk", "--graph", str(tmp_path / "nope.tsv"),
                     "--embeddings", str(tmp_path / "nope.txt"),
                     "--out", str(tmp_path / "out")])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_graph_without_embeddings_fails(self, tmp_path, walk_inputs, capsys):
        dump, _ = walk_inputs
        code = main(["walk", "--graph", str(dump), "--out", str(tmp_path / "out")])
        assert code == 1
        assert "embeddings" in capsys.readouterr().err

    def test_no_subcommand_prints_help(self, capsys):
        assert main([]) == 2
        assert "usage" in capsys.readouterr().out.lower()

    def test_bad_config_value_fails(self, tmp_path, walk_inputs, capsys):
        dump, vectors = walk_inputs
        config = tmp_path / "bad.ini"
        config.write_text("passes = -3\n", encoding="utf-8")
        code = main(["walk", "--config", str(config), "--graph", str(dump),
                     "--embeddings", str(vectors), "--out", str(tmp_path / "out")])
        assert code == 1
        assert "passes" in capsys.readouterr().err

    def test_data_dir_environment_fallback(self, tmp_path, walk_inputs, capsys, monkeypatch):
        dump, vectors = walk_inputs
        monkeypatch.setenv("CSKIT_DATA_DIR", str(dump.parent))
        elsewhere = tmp_path / "elsewhere"
        elsewhere.mkdir()
        monkeypatch.chdir(elsewhere)
        out = tmp_path / "out"
        code = main(["walk", "--graph", dump.name, "--embeddings", vectors.name,
                     "--out", str(out), "--seed", "7"])
        assert code == 0
        assert (out / "train.jsonl").exists()
