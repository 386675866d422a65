import json
import os
import pathlib

import pytest

import agentprint

FIXTURES = pathlib.Path(os.environ.get("AGENTPRINT_FIXTURES", pathlib.Path(__file__).parent.parent / "fixtures"))


@pytest.fixture(scope="module")
def small_matrix():
    records = agentprint.synthetic_corpus(seed=7, counts=[60, 40, 40, 30, 30])
    return agentprint.build_matrix(records)


def test_registry():
    names = agentprint.feature_names()
    assert len(names) == 53
    assert agentprint.feature_registry()["feature_count"] == 53
    assert "commit_multiline_ratio" in names


def test_parsers():
    shape = agentprint.parse_commit_message("feat(parser): add lexer")
    assert shape["is_conventional"] and not shape["is_multiline"]
    body = agentprint.parse_body("- [x] done\n- next\nsee [doc](http://a)")
    assert (body["checklist_items"], body["links"], body["bullet_lines"]) == (1, 1, 1)
    patch = agentprint.parse_patch("@@ -1 +1 @@\n-a\n+b\n c")
    assert patch["added_lines"] == ["b"] and patch["removed_lines"] == ["a"]
    assert agentprint.gini([1, 1, 1, 1]) == 0.0
    assert agentprint.gini([0, 0, 0, 4]) == pytest.approx(0.75)


def test_extract_fixture_record():
    line = (FIXTURES / "three_records.ndjson").read_text().splitlines()[0]
    values = agentprint.extract_features(json.loads(line))
    assert len(values) == 53
    with pytest.raises(ValueError):
        agentprint.extract_features({"id": "x"})


def test_matrix_roundtrip(small_matrix, tmp_path):
    assert small_matrix.n_rows == 200 and small_matrix.n_features == 53
    path = tmp_path / "m.csv"
    path.write_text(small_matrix.to_csv())
    back = agentprint.FeatureMatrix.read_csv(str(path))
    assert back.labels == small_matrix.labels
    assert back.feature_names == small_matrix.feature_names


def test_pipeline(small_matrix):
    reduction = agentprint.reduce(small_matrix)
    kept = reduction["kept"]
    assert 0 < len(kept) < 53
    reduced = small_matrix.select(kept)

    report = agentprint.cross_validate(reduced, folds=3)
    assert report["weighted"]["f1"] > 0.8
    assert len(report["per_fold_f1"]) == 3

    model = agentprint.train(reduced, learner="gbm", estimators=20)
    probs = model.predict_proba(reduced.row(0))
    assert sum(probs) == pytest.approx(1.0)
    assert model.predict(reduced.row(0)) in model.outputs
    shares = model.importance()
    assert sum(s for _, s in shares) == pytest.approx(1.0)

    clone = agentprint.Model.from_json(model.to_json())
    assert clone.predict_proba(reduced.row(3)) == model.predict_proba(reduced.row(3))

    fp = agentprint.fingerprint(reduced, top_k=2)
    assert set(fp["per_agent"]) == {"OpenAICodex", "Copilot", "Devin", "Cursor", "ClaudeCode"}


def test_schema_error():
    with pytest.raises(agentprint.SchemaError):
        agentprint.Model.from_json('{"format_version": 99}')


def test_cli_in_process():
    code, out, _ = agentprint.run_cli("dump-features")
    assert code == 0 and json.loads(out)["feature_count"] == 53
    code, _, err = agentprint.run_cli("extract", "--input", "/nonexistent.ndjson", "--out", "/tmp/x.csv")
    assert code == 2 and err
    assert agentprint.__version__ == "0.1.0"
