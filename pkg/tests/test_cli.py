import pytest
import asyncio
import json
import os

import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import streetforensics.cli as cli
from streetforensics.cli import EXIT_DATA, EXIT_FAILURE, EXIT_OK, EXIT_USAGE, build_parser, run
from streetforensics.infrastructure import CORPUS_ROOT_ENV
from streetforensics.models import DatasetManifest, Label, Quality, SubDataset, VideoRecord
from streetforensics.repositories import JsonLinesRepository, split_from_text


FIXTURE_CONFIG = os.path.join(os.path.dirname(__file__), "..", "configs", "fixture.cfg")


def write_config(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture
def manifest_file(tmp_path):
    records = [
        VideoRecord(
            video_id=f"Cityvid/RAW/{label.value}/{index:02d}",
            path=str(tmp_path / f"{label.value}_{index:02d}.mp4"),
            sub_dataset=SubDataset.CITYVID,
            label=label,
            quality=Quality.RAW,
            frame_count=30,
            width=1024,
            height=512,
            fps=10.0,
        )
        for label in Label
        for index in range(10)
    ]
    path = tmp_path / "corpus" / "manifest.jsonl"
    asyncio.run(JsonLinesRepository().write_manifest(DatasetManifest(records=records), str(path)))
    return path


class TestUsage:

    def test_no_arguments(self, capsys):
        assert run([]) == EXIT_USAGE
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag(self, capsys, tmp_path):
        assert run(["split", "--bogus", "--out", str(tmp_path)]) == EXIT_USAGE
        err = capsys.readouterr().err
        assert "unrecognized arguments: --bogus" in err

    def test_unknown_subcommand(self):
        assert run(["frobnicate"]) == EXIT_USAGE

    def test_every_subcommand_is_registered(self):
        parser = build_parser()

        for name in ("ingest", "synth", "compress", "split", "train", "eval", "matrix", "report", "reproduce"):
            args = parser.parse_args([name])
            assert args.subcommand == name
            assert args.out == "out"


class TestDataErrors:
    """Configuration and data problems exit with status 2 and name the field."""

    def test_ratios_not_summing_to_one(self, tmp_path, capsys):
        config = write_config(tmp_path / "bad.cfg", "split.ratios = 0.5, 0.3, 0.1\ntrain.max_epochs = 3\n")

        code = run(["train", "--config", config, "--out", str(tmp_path / "out")])

        assert code == EXIT_DATA
        assert "split.ratios" in capsys.readouterr().err

    def test_unknown_config_key(self, tmp_path, capsys):
        config = write_config(tmp_path / "bad.cfg", "data.manifst = corpus.jsonl\n")

        assert run(["split", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_DATA
        assert "data.manifst: unknown key" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        assert run(["split", "--config", str(tmp_path / "absent.cfg"), "--out", str(tmp_path)]) == EXIT_DATA
        assert "file not found" in capsys.readouterr().err

    def test_train_needs_max_epochs(self, tmp_path, capsys, manifest_file):
        config = write_config(tmp_path / "train.cfg", f"data.manifest = {manifest_file}\n")

        assert run(["train", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_DATA
        assert "train.max_epochs" in capsys.readouterr().err

    def test_train_rejects_missing_videos(self, tmp_path, capsys, manifest_file):
        split_config = write_config(tmp_path / "split.cfg", f"data.manifest = {manifest_file}\n")
        assert run(["split", "--config", split_config, "--out", str(tmp_path / "split")]) == EXIT_OK
        config = write_config(tmp_path / "train.cfg",
                              f"data.manifest = {manifest_file}\n"
                              f"data.split = {tmp_path / 'split' / 'split.jsonl'}\n"
                              "train.max_epochs = 1\n")
        capsys.readouterr()

        assert run(["train", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_DATA
        err = capsys.readouterr().err
        assert "20 finding(s)" in err
        assert "missing_file Cityvid/RAW/real/00" in err

    def test_split_needs_manifest(self, tmp_path, capsys):
        assert run(["split", "--out", str(tmp_path)]) == EXIT_DATA
        assert "data.manifest" in capsys.readouterr().err

    def test_compress_needs_quality(self, tmp_path, manifest_file):
        config = write_config(tmp_path / "c.cfg", f"data.manifest = {manifest_file}\n")

        assert run(["compress", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_DATA
        assert run(["compress", "--config", config, "--quality", "raw", "--out", str(tmp_path / "out")]) == EXIT_DATA

    def test_matrix_needs_spec(self, tmp_path):
        assert run(["matrix", "--out", str(tmp_path)]) == EXIT_DATA

    def test_eval_needs_checkpoint(self, tmp_path, capsys):
        assert run(["eval", "--out", str(tmp_path)]) == EXIT_DATA
        assert "eval.checkpoint" in capsys.readouterr().err

    def test_threshold_out_of_range(self, tmp_path, capsys):
        assert run(["eval", "--threshold", "1.5", "--out", str(tmp_path)]) == EXIT_DATA
        assert "eval.threshold" in capsys.readouterr().err

    def test_paper_scale_without_corpus(self, tmp_path, capsys, monkeypatch):
        monkeypatch.delenv(CORPUS_ROOT_ENV, raising=False)

        code = run(["reproduce", "--experiment", "table2", "--scale", "paper", "--out", str(tmp_path)])

        assert code == EXIT_DATA
        err = capsys.readouterr().err
        assert "corpus not found" in err
        assert "STREETFORENSICS_CORPUS_ROOT" in err

    def test_ingest_empty_directory(self, tmp_path, capsys, monkeypatch):
        monkeypatch.delenv(CORPUS_ROOT_ENV, raising=False)
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        config = write_config(tmp_path / "ingest.cfg", f"corpus.root = {corpus}\n")

        assert run(["ingest", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_DATA
        assert "no videos found" in capsys.readouterr().err


class TestSplitCommand:

    def test_writes_split_and_stamp(self, tmp_path, capsys, manifest_file):
        config = write_config(tmp_path / "split.cfg", f"data.manifest = {manifest_file}\n")
        out = tmp_path / "out"

        assert run(["split", "--config", config, "--seed", "5", "--out", str(out)]) == EXIT_OK

        assert capsys.readouterr().out.startswith("train=12 val=6 test=2")
        assignment = split_from_text((out / "split.jsonl").read_text(encoding="utf-8"))
        assert assignment.seed == 5
        stamp = json.loads((out / "run_stamp.json").read_text(encoding="utf-8"))
        assert stamp["seed"] == 5
        assert stamp["subcommand"] == "split"
        assert stamp["config"]["split"]["seed"] == 5
        assert set(stamp["schema_versions"]) == {"manifest", "split", "checkpoint"}

    def test_same_argv_same_outputs(self, tmp_path, manifest_file):
        config = write_config(tmp_path / "split.cfg", f"data.manifest = {manifest_file}\nseed = 3\n")
        out = tmp_path / "out"
        argv = ["split", "--config", config, "--out", str(out)]

        assert run(argv) == EXIT_OK
        first = {name: (out / name).read_bytes() for name in ("split.jsonl", "run_stamp.json")}
        assert run(argv) == EXIT_OK
        second = {name: (out / name).read_bytes() for name in ("split.jsonl", "run_stamp.json")}

        assert first == second


class TestReportCommand:

    def test_reference_table(self, tmp_path, capsys):
        assert run(["report", "--experiment", "table3", "--out", str(tmp_path)]) == EXIT_OK

        out = capsys.readouterr().out
        lines = [" ".join(line.split()) for line in out.splitlines()]
        assert "Training\\Testing | RAW | HQ | LQ" in lines
        assert "LQ | 99.70 | 99.63 | 99.19" in lines
        assert (tmp_path / "table3_reference.txt").read_text(encoding="utf-8") == out

    def test_csv_re_render(self, tmp_path, capsys):
        assert run(["report", "--experiment", "table4", "--format", "csv", "--out", str(tmp_path)]) == EXIT_OK
        csv_path = tmp_path / "table4_reference.csv"
        capsys.readouterr()

        assert run(["report", "--input", str(csv_path), "--out", str(tmp_path / "again")]) == EXIT_OK

        lines = [" ".join(line.split()) for line in capsys.readouterr().out.splitlines()]
        assert "Kittivid | 50.03 | 50.00 | 100.00" in lines

    def test_report_needs_a_source(self, tmp_path):
        assert run(["report", "--out", str(tmp_path)]) == EXIT_DATA


class TestRuntimeFailures:
    """Failures outside the data layer exit 3 with a message instead of a traceback."""

    def test_missing_encoder_binary(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("PATH", str(tmp_path / "empty-bin"))

        code = run(["synth", "--config", FIXTURE_CONFIG, "--out", str(tmp_path / "out")])

        assert code == EXIT_FAILURE
        assert "could not start encoder 'ffmpeg'" in capsys.readouterr().err

    def test_unexpected_exception(self, tmp_path, capsys, monkeypatch, manifest_file):
        async def broken_dispatch(*args, **kwargs):
            raise RuntimeError("disk vanished")

        monkeypatch.setattr(cli, "dispatch", broken_dispatch)
        config = write_config(tmp_path / "run.cfg", f"data.manifest = {manifest_file}\n")

        code = run(["split", "--config", config, "--out", str(tmp_path / "out")])

        assert code == EXIT_FAILURE
        assert "unexpected failure: RuntimeError: disk vanished" in capsys.readouterr().err
