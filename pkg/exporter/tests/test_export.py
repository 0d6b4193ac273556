"""Exporter tests, including the handoff contract with the calibration CLI."""

import json
import shutil
import subprocess

import pytest

from vak_exporter.cli import main
from vak_exporter.export import ExportError, TextExample, read_examples


def vak_cli(*argv):
    exe = shutil.which("vak")
    assert exe, "the vak CLI must be installed for the handoff tests"
    return subprocess.run([exe, *map(str, argv)], capture_output=True, text=True)


class TestReadExamples:
    def test_csv_with_labels(self, ten_line_fixture):
        examples = read_examples(ten_line_fixture)
        assert len(examples) == 10
        assert examples[0] == TextExample("t0", "the movie was great", None, 1)

    def test_jsonl(self, tmp_path):
        p = tmp_path / "t.jsonl"
        p.write_text('{"id": "a", "text": "good movie", "label": 1}\n'
                     '{"id": "b", "text": "bad film"}\n')
        examples = read_examples(p)
        assert examples[1].label is None

    def test_sentence_pairs(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("id,text,text2,label\na,good movie,fine film,1\nb,bad,awful,0\n")
        examples = read_examples(p)
        assert examples[0].text2 == "fine film"

    def test_duplicate_id_rejected(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("id,text\na,good\na,bad\n")
        with pytest.raises(ExportError, match="duplicate"):
            read_examples(p)

    def test_empty_text_rejected(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("id,text\na,\n")
        with pytest.raises(ExportError, match="empty text"):
            read_examples(p)

    def test_mixed_pairing_rejected(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("id,text,text2\na,good,fine\nb,bad,\n")
        with pytest.raises(ExportError, match="text2"):
            read_examples(p)


class TestExport:
    def test_logit_scores_are_raw_reals(self, tiny_model_dir, ten_line_fixture, tmp_path):
        out = tmp_path / "scores.csv"
        rc = main([str(ten_line_fixture), str(out), "--model", str(tiny_model_dir)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "id,score,label,target"
        assert len(lines) == 11

    def test_probability_scores_in_unit_interval(self, tiny_model_dir, ten_line_fixture, tmp_path):
        out = tmp_path / "probs.csv"
        rc = main([str(ten_line_fixture), str(out), "--model", str(tiny_model_dir),
                   "--score", "probability"])
        assert rc == 0
        for line in out.read_text().splitlines()[1:]:
            assert 0.0 <= float(line.split(",")[1]) <= 1.0

    def test_deterministic(self, tiny_model_dir, ten_line_fixture, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        c = tmp_path / "c.csv"
        assert main([str(ten_line_fixture), str(a), "--model", str(tiny_model_dir)]) == 0
        assert main([str(ten_line_fixture), str(b), "--model", str(tiny_model_dir)]) == 0
        assert a.read_bytes() == b.read_bytes()
        # regrouping into other batches may shift floats by rounding only
        assert main([str(ten_line_fixture), str(c), "--model", str(tiny_model_dir),
                     "--batch-size", "3"]) == 0
        for la, lc in zip(a.read_text().splitlines()[1:], c.read_text().splitlines()[1:]):
            assert float(la.split(",")[1]) == pytest.approx(float(lc.split(",")[1]), abs=1e-4)

    def test_unloadable_model_fails(self, ten_line_fixture, tmp_path):
        rc = main([str(ten_line_fixture), str(tmp_path / "o.csv"),
                   "--model", str(tmp_path / "no-such-model")])
        assert rc == 1

    def test_malformed_input_fails(self, tiny_model_dir, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("col1,col2\nx,y\n")
        rc = main([str(bad), str(tmp_path / "o.csv"), "--model", str(tiny_model_dir)])
        assert rc == 1


class TestToolkitHandoff:
    def test_output_passes_score_file_validation(self, tiny_model_dir, ten_line_fixture, tmp_path):
        # the reference validator for the interchange schema
        from vak.dataio import read_scores

        out = tmp_path / "scores.csv"
        assert main([str(ten_line_fixture), str(out), "--model", str(tiny_model_dir)]) == 0
        sf = read_scores(out, require_labels=True)
        assert len(sf) == 10

    def test_flows_through_calibrate_predict_evaluate(
        self, tiny_model_dir, ten_line_fixture, tmp_path
    ):
        scores = tmp_path / "scores.csv"
        assert main([str(ten_line_fixture), str(scores), "--model", str(tiny_model_dir)]) == 0

        model = tmp_path / "model.json"
        res = vak_cli("calibrate", scores, model)
        assert res.returncode == 0, res.stderr

        predictions = tmp_path / "pred.csv"
        res = vak_cli("predict", model, scores, predictions)
        assert res.returncode == 0, res.stderr

        metrics = tmp_path / "metrics.json"
        res = vak_cli("evaluate", predictions, "--json", metrics)
        assert res.returncode == 0, res.stderr
        doc = json.loads(metrics.read_text())
        assert doc["n"] == 10
        assert 0.0 <= doc["ece"] <= 1.0
        print(f"PASS exporter-contract: 10-line fixture flowed through "
              f"calibrate/predict/evaluate (ece {doc['ece']:.3f})")

    def test_unlabeled_export_succeeds_but_downstream_rejects(
        self, tiny_model_dir, tmp_path
    ):
        texts = tmp_path / "t.csv"
        texts.write_text("id,text\na,good movie\nb,awful film\n")
        scores = tmp_path / "s.csv"
        assert main([str(texts), str(scores), "--model", str(tiny_model_dir)]) == 0
        res = vak_cli("calibrate", scores, tmp_path / "m.json")
        assert res.returncode == 1
        assert "label" in res.stderr
