"""
Newline-delimited JSON datasets: questions, gold solutions, model outputs and
result rows. One object per line; bad lines are reported with their line
numbers and skipped.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional
import json
import logging

from core.domain import SolutionRecord
from core.errors import DatasetFormatError, MawarithError, PairingError

logger = logging.getLogger(__name__)

DEFAULT_FIELDS = {
    "case_id": "id",
    "question": "question",
    "gold": "answer",
    "prediction": "output",
}


def parse_field_map(text: Optional[str]) -> dict[str, str]:
    """
    "case_id=qid,gold=solution" on top of DEFAULT_FIELDS.
    """
    fields = dict(DEFAULT_FIELDS)
    if not text:
        return fields
    for part in text.split(","):
        if not part.strip():
            continue
        key, sep, value = part.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in DEFAULT_FIELDS or not value:
            raise ValueError(f"Invalid field mapping {part!r}; keys are {', '.join(DEFAULT_FIELDS)}")
        fields[key] = value
    return fields


@dataclass
class DatasetEntry:
    case_id: str
    question: str = ""
    gold: Optional[SolutionRecord] = None
    raw: dict = field(default_factory=dict, repr=False)


def read_jsonl(path: Path, problems: list[tuple[int, str]]) -> list[tuple[int, dict]]:
    """Decoded objects with their line numbers; bad lines go to `problems`."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Dataset not found: {path}")
    rows = []
    with path.open(encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                problems.append((line_no, f"invalid JSON: {e.msg}"))
                continue
            if not isinstance(obj, dict):
                problems.append((line_no, "line is not a JSON object"))
                continue
            rows.append((line_no, obj))
    return rows


def _report(path: Path, problems: list[tuple[int, str]], valid: int) -> None:
    for line_no, message in problems:
        logger.warning("%s:%d: %s", path, line_no, message)
    if valid == 0:
        raise DatasetFormatError(f"No valid records in {path}", problems)


def _gold_record(value: Any) -> SolutionRecord:
    if isinstance(value, str):
        return SolutionRecord.loads(value)
    return SolutionRecord.from_json(value)


def load_dataset(
    path: Path,
    field_map: Optional[dict[str, str]] = None,
    problems: Optional[list[tuple[int, str]]] = None,
) -> list[DatasetEntry]:
    """
    Load question/gold entries in file order.

    :param field_map: Dataset field names (see DEFAULT_FIELDS).
    :param problems: Receives (line_no, message) for every skipped line.
    :raises DatasetFormatError: no line yielded a usable entry.
    """
    fields = field_map or DEFAULT_FIELDS
    problems = problems if problems is not None else []
    entries: list[DatasetEntry] = []
    seen: set[str] = set()
    for line_no, obj in read_jsonl(path, problems):
        case_id = obj.get(fields["case_id"])
        if case_id is None or str(case_id).strip() == "":
            problems.append((line_no, f"missing {fields['case_id']!r}"))
            continue
        case_id = str(case_id)
        if case_id in seen:
            problems.append((line_no, f"duplicate id {case_id!r}"))
            continue
        question = obj.get(fields["question"]) or ""
        gold = None
        if obj.get(fields["gold"]) is not None:
            try:
                gold = _gold_record(obj[fields["gold"]])
            except MawarithError as e:
                problems.append((line_no, f"bad gold record: {e}"))
                continue
        if not question and gold is None:
            problems.append((line_no, f"neither {fields['question']!r} nor {fields['gold']!r}"))
            continue
        seen.add(case_id)
        entries.append(DatasetEntry(case_id=case_id, question=str(question), gold=gold, raw=obj))
    _report(Path(path), problems, len(entries))
    return entries


def load_predictions(
    path: Path,
    field_map: Optional[dict[str, str]] = None,
    problems: Optional[list[tuple[int, str]]] = None,
) -> dict[str, Any]:
    """case id -> raw model output (a string or an already-decoded object)."""
    fields = field_map or DEFAULT_FIELDS
    problems = problems if problems is not None else []
    predictions: dict[str, Any] = {}
    for line_no, obj in read_jsonl(path, problems):
        case_id = obj.get(fields["case_id"])
        if case_id is None:
            problems.append((line_no, f"missing {fields['case_id']!r}"))
            continue
        case_id = str(case_id)
        if case_id in predictions:
            problems.append((line_no, f"duplicate id {case_id!r}"))
            continue
        if fields["prediction"] in obj:
            predictions[case_id] = obj[fields["prediction"]]
        elif fields["gold"] in obj:
            # a solved or repaired file can stand in for predictions
            predictions[case_id] = obj[fields["gold"]]
        else:
            problems.append((line_no, f"missing {fields['prediction']!r}"))
    _report(Path(path), problems, len(predictions))
    return predictions


def pair_cases(gold: list[DatasetEntry], predictions: dict[str, Any]) -> list[tuple[DatasetEntry, Any]]:
    """Gold entries with their predictions, in gold order."""
    gold_ids = {entry.case_id for entry in gold}
    missing = gold_ids - predictions.keys()
    unknown = predictions.keys() - gold_ids
    if missing or unknown:
        raise PairingError(missing, unknown)
    return [(entry, predictions[entry.case_id]) for entry in gold]


def write_jsonl(path: Path, rows: Iterable[dict]) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")
            count += 1
    return count
