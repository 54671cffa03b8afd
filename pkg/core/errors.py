"""
Exception hierarchy for the Mawarith toolkit.

Every error raised on purpose derives from MawarithError. Errors that signal
bad input also derive from ValueError so callers that only know the builtin
still catch them.
"""

from pathlib import Path
from typing import Iterable, Optional


class MawarithError(Exception):
    """Root of all toolkit errors."""


class FractionError(MawarithError, ValueError):
    """Invalid fraction construction or fraction text."""


class ContractViolation(MawarithError):
    """An operation was called outside its precondition."""


class CaseFormatError(MawarithError, ValueError):
    """The scenario text does not follow the `مات وترك:` template."""


class CaseParseError(MawarithError, ValueError):
    """A phrase inside the enumeration could not be understood."""

    def __init__(self, message: str, phrase: str = ""):
        super().__init__(message)
        self.phrase = phrase


class LabelResolutionError(CaseParseError):
    """A heir label does not resolve to any taxonomy category."""

    def __init__(self, raw: str):
        super().__init__(f"Unknown heir label: {raw!r}", phrase=raw)
        self.raw = raw


class RuleSyntaxError(MawarithError, ValueError):
    """A rule or taxonomy file line is malformed."""

    def __init__(self, message: str, path: Optional[Path] = None, line_no: int = 0):
        where = f"{path}:{line_no}: " if path is not None else ""
        super().__init__(f"{where}{message}")
        self.path = path
        self.line_no = line_no


class RuleCoverageError(MawarithError):
    """No share rule (or more than one) fired for an eligible heir."""

    def __init__(self, message: str, category: str = ""):
        super().__init__(message)
        self.category = category


class ExtractionError(MawarithError, ValueError):
    """No JSON object could be recovered from model output."""


class SchemaError(ExtractionError):
    """A recovered JSON object lacks required keys."""

    def __init__(self, missing: Iterable[str]):
        self.missing = tuple(missing)
        super().__init__(f"Missing required keys: {', '.join(self.missing)}")


class AggregationError(MawarithError, ValueError):
    """Aggregation was asked to summarise an empty batch."""


class DatasetFormatError(MawarithError, ValueError):
    """A dataset file yielded no usable records."""

    def __init__(self, message: str, problems: Optional[list[tuple[int, str]]] = None):
        super().__init__(message)
        self.problems = problems or []


class PairingError(MawarithError, ValueError):
    """Gold and prediction files disagree on case ids."""

    def __init__(self, missing_predictions: Iterable[str], unknown_predictions: Iterable[str]):
        self.missing_predictions = sorted(missing_predictions)
        self.unknown_predictions = sorted(unknown_predictions)
        parts = []
        if self.missing_predictions:
            parts.append(f"no prediction for: {', '.join(self.missing_predictions)}")
        if self.unknown_predictions:
            parts.append(f"prediction without gold: {', '.join(self.unknown_predictions)}")
        super().__init__("Case ids do not pair up; " + "; ".join(parts))
