"""Command-line behavior: output shapes, exit codes, config precedence."""
import json
from pathlib import Path

import pytest

from navscore.cli import main

GOLDEN_CORPUS = str(Path(__file__).parent / "fixtures" / "golden_corpus.json")


@pytest.fixture()
def corpus_file(tmp_path):
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps({
        "0": {"path": "a.jpg", "query": "which way now", "answer": "Turn left at the door."},
        "1": {"path": "b.jpg", "query": "anything ahead", "answer": "Yes, there is a table."},
    }), "utf-8")
    return path


@pytest.fixture()
def predictions_file(tmp_path):
    path = tmp_path / "predictions.json"
    path.write_text(json.dumps({
        "0": "Turn left at the door.",
        "1": "Yes, there is a table.",
    }), "utf-8")
    return path


class TestScore:
    def test_identity_prints_full_marks(self, capsys):
        assert main(["score", "--ref", "turn left", "--pred", "turn left"]) == 0
        out = capsys.readouterr().out
        assert "final_score 1.000" in out
        assert "bert_f1 1.000" in out

    def test_reversal_prints_zero_enhanced(self, capsys):
        code = main([
            "score", "--ref", "turn left then walk forward",
            "--pred", "walk forward then turn left",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "enhanced_score 0.000" in out
        assert "critical_mismatch true" in out

    def test_json_output_parses(self, capsys):
        assert main(["score", "--ref", "go left", "--pred", "go right", "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["conflict"] is True
        assert payload["config"]["alpha"] == 0.4

    def test_missing_pred_is_usage_error(self, capsys):
        assert main(["score", "--ref", "go left"]) == 2
        assert "usage" in capsys.readouterr().err.lower()

    def test_flag_overrides(self, capsys):
        assert main([
            "score", "--ref", "go left", "--pred", "go left please", "--w", "0.0", "--json",
        ]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["config"]["w"] == 0.0
        assert payload["final_score"] == payload["bert_f1"]

    def test_unreachable_remote_backend_exits_3(self, capsys):
        code = main([
            "score", "--ref", "a", "--pred", "b",
            "--backend", "remote", "--endpoint", "http://127.0.0.1:9",
            "--timeout-ms", "200",
        ])
        assert code == 3
        assert "error" in capsys.readouterr().err

    def test_invalid_weights_exit_1(self, capsys):
        code = main(["score", "--ref", "a", "--pred", "b", "--alpha", "0.9"])
        assert code == 1
        assert "sum" in capsys.readouterr().err


class TestConfigResolution:
    def test_config_file_applies(self, tmp_path, capsys):
        config = tmp_path / "navscore.toml"
        config.write_text("w = 0.25\n", "utf-8")
        assert main(["score", "--ref", "x", "--pred", "x", "--config", str(config),
                     "--json"]) == 0
        assert json.loads(capsys.readouterr().out)["config"]["w"] == 0.25

    def test_flags_beat_config_file(self, tmp_path, capsys):
        config = tmp_path / "navscore.toml"
        config.write_text("w = 0.25\n", "utf-8")
        assert main(["score", "--ref", "x", "--pred", "x", "--config", str(config),
                     "--w", "0.75", "--json"]) == 0
        assert json.loads(capsys.readouterr().out)["config"]["w"] == 0.75

    def test_env_var_fallback(self, tmp_path, capsys, monkeypatch):
        config = tmp_path / "navscore.toml"
        config.write_text("w = 0.125\n", "utf-8")
        monkeypatch.setenv("NAVSCORE_CONFIG", str(config))
        assert main(["score", "--ref", "x", "--pred", "x", "--json"]) == 0
        assert json.loads(capsys.readouterr().out)["config"]["w"] == 0.125

    def test_unknown_config_key_exits_1(self, tmp_path, capsys):
        config = tmp_path / "navscore.toml"
        config.write_text("turbo = true\n", "utf-8")
        code = main(["score", "--ref", "x", "--pred", "x", "--config", str(config)])
        assert code == 1
        assert "turbo" in capsys.readouterr().err

    def test_custom_lexicon_flag(self, tmp_path, capsys):
        lexicon = tmp_path / "lex.tsv"
        lexicon.write_text("port\tLEFT\nstarboard\tRIGHT\n", "utf-8")
        assert main(["score", "--ref", "to port", "--pred", "to starboard",
                     "--lexicon", str(lexicon), "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["conflict"] is True


class TestEvaluate:
    def test_identity_run_summary(self, corpus_file, predictions_file, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main([
            "evaluate", "--corpus", str(corpus_file), "--predictions", str(predictions_file),
            "--out", str(out), "--no-timestamp",
        ])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "mean final_score 1.0000" in stdout
        assert json.loads(out.read_text("utf-8"))["counts"]["records"] == 2

    def test_strict_missing_id_exits_1(self, corpus_file, tmp_path, capsys):
        predictions = tmp_path / "partial.json"
        predictions.write_text('{"0": "Turn left at the door."}', "utf-8")
        code = main([
            "evaluate", "--corpus", str(corpus_file), "--predictions", str(predictions),
            "--out", str(tmp_path / "r.json"), "--strict",
        ])
        assert code == 1
        assert "1" in capsys.readouterr().err  # names the missing id

    def test_skip_missing_is_default(self, corpus_file, tmp_path, capsys):
        predictions = tmp_path / "partial.json"
        predictions.write_text('{"0": "Turn left at the door."}', "utf-8")
        out = tmp_path / "r.json"
        code = main([
            "evaluate", "--corpus", str(corpus_file), "--predictions", str(predictions),
            "--out", str(out), "--no-timestamp",
        ])
        assert code == 0
        report = json.loads(out.read_text("utf-8"))
        assert report["counts"]["missing_predictions"] == 1

    def test_csv_format(self, corpus_file, predictions_file, tmp_path):
        out = tmp_path / "report.csv"
        code = main([
            "evaluate", "--corpus", str(corpus_file), "--predictions", str(predictions_file),
            "--out", str(out), "--format", "csv", "--no-timestamp",
        ])
        assert code == 0
        lines = out.read_text("utf-8").splitlines()
        assert lines[0].startswith("id,bert_f1,")
        assert len([l for l in lines if not l.startswith("#")]) == 3  # header + 2 rows

    def test_missing_corpus_file_exits_1(self, tmp_path, capsys):
        code = main([
            "evaluate", "--corpus", str(tmp_path / "nope.json"),
            "--predictions", str(tmp_path / "nope2.json"), "--out", str(tmp_path / "r.json"),
        ])
        assert code == 1
        assert capsys.readouterr().err

    def test_bad_format_is_usage_error(self, corpus_file, predictions_file, tmp_path, capsys):
        code = main([
            "evaluate", "--corpus", str(corpus_file), "--predictions", str(predictions_file),
            "--out", str(tmp_path / "r.xml"), "--format", "xml",
        ])
        assert code == 2


class TestInspect:
    def test_directional_instruction(self, capsys):
        assert main(["inspect", "--text", "Go straight for a few steps and turn left."]) == 0
        out = capsys.readouterr().out
        assert "directions: [FORWARD, LEFT]" in out
        assert "surface='go straight'" in out

    def test_plain_answer_has_no_directions(self, capsys):
        assert main(["inspect", "--text", "Yes, there's a big table."]) == 0
        assert "directions: []" in capsys.readouterr().out

    def test_empty_text_exits_zero(self, capsys):
        assert main(["inspect", "--text", ""]) == 0
        out = capsys.readouterr().out
        assert "tokens: " in out

    def test_missing_text_is_usage_error(self):
        assert main(["inspect"]) == 2


class TestStats:
    def test_golden_corpus_profile(self, capsys):
        assert main(["stats", "--corpus", GOLDEN_CORPUS]) == 0
        out = capsys.readouterr().out
        assert "records 20" in out
        assert "query words:" in out
        assert "answer words:" in out
        assert "answer directional actions:" in out

    def test_query_lengths_in_expected_band(self, capsys):
        # the fixture corpus follows the 4-to-8-word query profile
        assert main(["stats", "--corpus", GOLDEN_CORPUS]) == 0
        out = capsys.readouterr().out
        line = next(l for l in out.splitlines() if l.startswith("query words:"))
        assert "min 4" in line or "min 5" in line
        assert "max 7" in line or "max 8" in line

    def test_empty_corpus(self, tmp_path, capsys):
        path = tmp_path / "empty.json"
        path.write_text("{}", "utf-8")
        assert main(["stats", "--corpus", str(path)]) == 0
        assert "records 0" in capsys.readouterr().out

    def test_single_record_degenerate_stats(self, tmp_path, capsys):
        path = tmp_path / "one.json"
        path.write_text(json.dumps({
            "0": {"path": "a.jpg", "query": "where is the door", "answer": "Go ahead."}
        }), "utf-8")
        assert main(["stats", "--corpus", str(path)]) == 0
        out = capsys.readouterr().out
        line = next(l for l in out.splitlines() if l.startswith("query words:"))
        assert "min 4" in line and "max 4" in line

    def test_malformed_corpus_exits_1(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("[]", "utf-8")
        assert main(["stats", "--corpus", str(path)]) == 1


def test_unknown_subcommand_is_usage_error():
    assert main(["frobnicate"]) == 2


def test_no_arguments_is_usage_error():
    assert main([]) == 2
