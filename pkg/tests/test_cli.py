import json
from pathlib import Path

import pytest

from framecue.__main__ import EXIT_CONFIG_ERROR, EXIT_OK, EXIT_STAGE_ERROR, build_parser, main, resolve_config
from framecue.harness.questions import QuestionRecord, dump_questions
from framecue.probe.table import ProbeTable
from tests.helpers import FIXTURES


@pytest.fixture
def workspace(tmp_path, small_video):
    manifest = tmp_path / "videos" / "manifest.json"
    questions = tmp_path / "questions.jsonl"
    dump_questions(
        [
            QuestionRecord(
                id="q1",
                video_id=small_video.video_id,
                question="What happened after the dog barked?",
                options=["It sat.", "It ran."],
                answer="B",
            ),
            QuestionRecord(id="q2", video_id=small_video.video_id, question="Describe the content of frame #1."),
        ],
        questions,
    )
    return {"manifest": str(manifest), "questions": str(questions), "out": str(tmp_path / "out")}


def test_missing_config_exits_with_config_error(tmp_path, caplog):
    missing = tmp_path / "nowhere.toml"
    assert main(["eval", "--config", str(missing)]) == EXIT_CONFIG_ERROR
    assert f"config file not found: {missing}" in caplog.text


def test_eval_without_manifest_is_a_config_error(caplog):
    assert main(["eval"]) == EXIT_CONFIG_ERROR
    assert "no question file" in caplog.text


def test_flags_override_preset_and_file(tmp_path):
    config_file = tmp_path / "run.toml"
    config_file.write_text('[vp]\nposition = "TR"\nsize_divisor = 20\n')
    args = build_parser().parse_args(
        ["render", "--config", str(config_file), "--preset", "qwen-vl/mvbench/64f", "--vp-s", "16", "--tau", "0.5", "--no-vp"]
    )
    config = resolve_config(args)
    assert config.vp.position == "TR"
    assert config.vp.size_divisor == 16
    assert config.kfm.tau == 0.5
    assert config.prompt_profile == "mvbench"
    assert config.vp_enabled is False


def test_eval_dry_run(workspace, capsys):
    argv = ["eval", "--dry-run", "--manifest", workspace["manifest"], "--questions", workspace["questions"], "--tau", "1.0"]
    assert main(argv) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["config"]["kfm"]["tau"] == 1.0
    assert out["plan"] == {
        "questions": 2,
        "unknown_videos": [],
        "videos": 1,
        "frames_rendered": 8,
        "model_requests": 2,
        "frames_sent": 16,
        "extractor_requests": 0,
        "image_embeddings": 0,
        "kfm_enabled": False,
    }


def test_eval_writes_reports(workspace, capsys):
    argv = ["eval", "--manifest", workspace["manifest"], "--questions", workspace["questions"], "--output-dir", workspace["out"]]
    assert main(argv) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[0].split() == ["category", "accuracy", "correct", "graded", "failed"]

    report = json.loads(Path(workspace["out"], "report.json").read_text())
    assert report["total"]["evaluated"] == 1 and report["total"]["ungraded"] == 1
    records = [json.loads(line) for line in Path(workspace["out"], "records.jsonl").read_text().splitlines()]
    assert [r["question_id"] for r in records] == ["q1", "q2"]
    assert records[1]["raw_answer"] == "The frame shows a plain textured background."
    assert records[0]["mappings"][0]["keyword"]["text"] == "the dog barked"


def test_repeated_eval_runs_write_identical_reports(workspace, tmp_path):
    def run(out: Path) -> list[dict]:
        argv = ["eval", "--manifest", workspace["manifest"], "--questions", workspace["questions"]]
        assert main([*argv, "--tau", "-1", "--in-flight", "4", "--output-dir", str(out)]) == EXIT_OK
        lines = (out / "records.jsonl").read_text().splitlines()
        return [{k: v for k, v in json.loads(line).items() if k != "latency_ms"} for line in lines]

    first, second = run(tmp_path / "first"), run(tmp_path / "second")
    assert (tmp_path / "first" / "report.json").read_bytes() == (tmp_path / "second" / "report.json").read_bytes()
    assert (tmp_path / "first" / "report.txt").read_bytes() == (tmp_path / "second" / "report.txt").read_bytes()
    assert first == second


def test_map_prints_prompts(workspace, capsys):
    argv = ["map", "--manifest", workspace["manifest"], "--questions", workspace["questions"], "--tau", "-1"]
    assert main(argv) == EXIT_OK
    rows = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [row["question_id"] for row in rows] == ["q1", "q2"]
    assert rows[0]["mappings"][0]["keyword"]["text"] == "the dog barked"
    assert "the dog barked (frame " in rows[0]["augmented_prompt"]


def test_render_writes_labeled_frames(workspace, tmp_path):
    argv = ["render", "--manifest", workspace["manifest"], "--output-dir", workspace["out"], "--vp-style", "style2"]
    assert main(argv) == EXIT_OK
    written = sorted(p.name for p in (tmp_path / "out" / "frames" / "synthetic-000").iterdir())
    assert written == [f"{i:04d}.png" for i in range(1, 9)]


def test_probe_with_mock_model(tmp_path, capsys):
    argv = ["probe", "--model", "mock", "--videos", "2", "--frame-counts", "4", "8", "--output-dir", str(tmp_path)]
    assert main(argv) == EXIT_OK
    assert capsys.readouterr().out.startswith("Lookup accuracy (%)")
    table = json.loads((tmp_path / "probe.json").read_text())
    assert table["lookup"]["BL"] == {"4": 100.0, "8": 100.0, "average": 100.0}
    assert table["reverse_lookup"]["--"]["average"] == 0.0


def _table_with_failure(*args, **kwargs):
    table = ProbeTable(frame_counts=[4], positions=["BL"])
    table.record_failure("BL", 4)
    return table


def test_probe_failures_give_stage_error_exit(tmp_path, monkeypatch):
    monkeypatch.setattr("framecue.__main__.run_probe_suite", _table_with_failure)
    argv = ["probe", "--videos", "1", "--frame-counts", "4", "--output-dir", str(tmp_path)]
    assert main(argv) == EXIT_STAGE_ERROR


def test_poslab(capsys):
    assert main(["poslab", "--text-len", "10", "--tokens-per-frame", "4", "--frames", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[standard]\n  frame 1: 10 11 12 13\n  frame 2: 14 15 16 17\n" in out
    assert "[temporal_only]\n  frame 1: 10 11 12 13\n  frame 2: 10 11 12 13\n" in out
    assert "[full_collapse]\n  frame 1: 10 10 10 10\n" in out


def test_poslab_mrope(capsys):
    assert main(["poslab", "--mrope", "--mode", "full_collapse", "--grid", "1", "2", "--frames", "1", "--text-len", "5"]) == EXIT_OK
    assert capsys.readouterr().out == "[full_collapse]\n  (0, 0, 0) -> (5, 0, 0)\n  (0, 0, 1) -> (5, 0, 0)\n"


def test_attn(capsys):
    dump = str(FIXTURES / "attention" / "two_layer_dump.json")
    assert main(["attn", dump]) == EXIT_OK
    assert capsys.readouterr().out == "layer   0  0.500000\nlayer   1  0.550000\n"

    assert main(["attn", dump, "--baseline", dump]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.endswith("overall change 0.00%, mean of layer changes 0.00%\n")


def test_attn_bad_dump_is_a_stage_error(tmp_path):
    broken = tmp_path / "dump.json"
    broken.write_text("{}")
    assert main(["attn", str(broken)]) == EXIT_STAGE_ERROR
