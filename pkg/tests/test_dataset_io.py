import json

import pytest

from core.errors import DatasetFormatError, PairingError
from tools.dataset_io import (
    DEFAULT_FIELDS,
    load_dataset,
    load_predictions,
    pair_cases,
    parse_field_map,
    write_jsonl,
)
from tests.worked_cases import CASE2_GOLD, TABLE2_GOLD, TABLE2_QUESTION


def _write(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _dumps(obj):
    return json.dumps(obj, ensure_ascii=False)


def test_field_map_overrides():
    fields = parse_field_map("case_id=qid, gold=solution")
    assert fields["case_id"] == "qid"
    assert fields["gold"] == "solution"
    assert fields["question"] == DEFAULT_FIELDS["question"]
    assert parse_field_map(None) == DEFAULT_FIELDS


@pytest.mark.parametrize("text", ["answer=x", "case_id", "gold="])
def test_field_map_rejects_bad_entries(text):
    with pytest.raises(ValueError):
        parse_field_map(text)


def test_load_dataset_skips_bad_lines(tmp_path):
    path = _write(
        tmp_path / "gold.jsonl",
        [
            _dumps({"id": "t2", "question": TABLE2_QUESTION, "answer": TABLE2_GOLD}),
            "{not json",
            "[1, 2]",
            _dumps({"question": "مات وترك: ابن."}),
            _dumps({"id": "t2", "question": TABLE2_QUESTION}),
            _dumps({"id": "c2", "answer": _dumps(CASE2_GOLD)}),
            _dumps({"id": "bad", "answer": {"heirs": []}}),
            _dumps({"id": "nothing"}),
        ],
    )
    problems = []
    entries = load_dataset(path, problems=problems)
    assert [e.case_id for e in entries] == ["t2", "c2"]
    assert entries[0].question == TABLE2_QUESTION
    assert entries[1].gold is not None and entries[1].question == ""
    assert [line for line, _ in problems] == [2, 3, 4, 5, 7, 8]
    assert "duplicate" in problems[3][1]


def test_load_dataset_with_custom_fields(tmp_path):
    path = _write(tmp_path / "gold.jsonl", [_dumps({"qid": 7, "q": "مات وترك: ابن."})])
    entries = load_dataset(path, parse_field_map("case_id=qid,question=q"))
    assert entries[0].case_id == "7"
    assert entries[0].gold is None


def test_empty_dataset_is_an_error(tmp_path):
    path = _write(tmp_path / "gold.jsonl", ["", "{bad"])
    with pytest.raises(DatasetFormatError) as info:
        load_dataset(path)
    assert info.value.problems == [(2, info.value.problems[0][1])]


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path / "absent.jsonl")


def test_predictions_fall_back_to_gold_field(tmp_path):
    path = _write(
        tmp_path / "pred.jsonl",
        [
            _dumps({"id": "a", "output": "```json\n{}\n```"}),
            _dumps({"id": "b", "answer": TABLE2_GOLD}),
            _dumps({"id": "c"}),
        ],
    )
    problems = []
    predictions = load_predictions(path, problems=problems)
    assert set(predictions) == {"a", "b"}
    assert predictions["b"] == TABLE2_GOLD
    assert problems[0][0] == 3


def test_pairing(tmp_path):
    path = _write(
        tmp_path / "gold.jsonl",
        [_dumps({"id": "a", "answer": TABLE2_GOLD}), _dumps({"id": "b", "answer": CASE2_GOLD})],
    )
    gold = load_dataset(path)
    pairs = pair_cases(gold, {"b": "x", "a": "y"})
    assert [(entry.case_id, raw) for entry, raw in pairs] == [("a", "y"), ("b", "x")]
    with pytest.raises(PairingError) as info:
        pair_cases(gold, {"a": "y", "z": "w"})
    assert info.value.missing_predictions == ["b"]
    assert info.value.unknown_predictions == ["z"]


def test_write_jsonl_keeps_arabic(tmp_path):
    path = tmp_path / "out" / "rows.jsonl"
    assert write_jsonl(path, [{"id": "a", "وريث": "زوجة"}, {"id": "b"}]) == 2
    lines = path.read_text(encoding="utf-8").splitlines()
    assert "زوجة" in lines[0]
    assert json.loads(lines[1]) == {"id": "b"}
