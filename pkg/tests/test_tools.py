import threading
import time

import pytest

from core.batch import BatchRunner
from core.errors import CaseParseError
from tools.arabic_text import clean, fix_spelling, latin_digits, match_key
from tools.json_extract import balanced_objects, clean_output, extract_json


def test_clean_removes_tatweel_and_spaces():
    assert clean("  أم   ـالأم ") == "أم الأم"
    assert clean("") == ""


def test_match_key_folds_spelling():
    assert match_key("باقى التركة") == match_key("باقي التركة")
    assert match_key("أخ لأب") == match_key("اخ لاب")


def test_digits_and_spelling():
    assert latin_digits("٤/٢٧") == "4/27"
    assert fix_spelling("باقى التركة") == "باقي التركة"


def test_clean_output_drops_reasoning():
    assert clean_output("<think>{\"a\": 1}</think>{\"b\": 2}") == '{"b": 2}'
    assert clean_output("partial reasoning</think>\n```json\n{}\n```") == "{}"


def test_balanced_objects_ignore_braces_in_strings():
    text = 'x {"a": "}{"} y {"b": {"c": 1}}'
    assert list(balanced_objects(text)) == ['{"a": "}{"}', '{"b": {"c": 1}}']


def test_extract_json_takes_first_decodable_object():
    assert extract_json("{oops} then {\"ok\": true}") == {"ok": True}
    assert extract_json("no json here") is None
    assert extract_json("") is None


def test_batch_runner_keeps_order():
    def slow(n):
        time.sleep(0.01 * (5 - n))
        return n * n

    results = BatchRunner(workers=4).run([(f"c{n}", n) for n in range(5)], slow)
    assert [r.case_id for r in results] == ["c0", "c1", "c2", "c3", "c4"]
    assert [r.value for r in results] == [0, 1, 4, 9, 16]


def test_batch_runner_captures_failures():
    def parse(text):
        if text == "bad":
            raise CaseParseError("cannot read", phrase=text)
        return text

    results = BatchRunner().run([("a", "ok"), ("b", "bad"), ("c", "fine")], parse)
    assert [r.success for r in results] == [True, False, True]
    assert results[1].error_type == "CaseParseError"
    assert "CaseParseError" in results[1].summary()


def test_batch_runner_uses_threads():
    seen = set()

    def record(_):
        seen.add(threading.get_ident())
        time.sleep(0.02)

    BatchRunner(workers=3).run([(str(i), i) for i in range(6)], record)
    assert len(seen) > 1


def test_batch_runner_rejects_zero_workers():
    with pytest.raises(ValueError):
        BatchRunner(workers=0)
