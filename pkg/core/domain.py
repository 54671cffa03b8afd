"""
Shared vocabulary: exact fractions, heir categories, share values, adjustment
labels and the five-field solution record with its JSON codec.

Records coming from a model are kept lenient: labels stay raw strings and a
share or percentage that does not parse is stored as None next to its raw
text, so the evaluator can score it 0 instead of rejecting the whole record.
"""

from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation, ROUND_HALF_EVEN
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Optional
import json
import re

from tools.arabic_text import clean, latin_digits, match_key

from .errors import ContractViolation, ExtractionError, FractionError, SchemaError

HEIR_KEY = "وريث"
COUNT_KEY = "عدد"
FRACTION_KEY = "كسر"
PERCENT_KEY = "نسبة"

REQUIRED_KEYS = ("heirs", "blocked", "shares", "awl_or_radd", "post_tasil")

RESIDUE_LABEL = "باقي التركة"
_RESIDUE_PHRASES = {match_key(p) for p in (RESIDUE_LABEL, "باقى التركة", "الباقي", "ما بقي")}

# Field aliases accepted on input; output always uses the Arabic keys.
_HEIR_ALIASES = (HEIR_KEY, "heir", "label", "category")
_COUNT_ALIASES = (COUNT_KEY, "count", "n")
_FRACTION_ALIASES = (FRACTION_KEY, "fraction", "share", "shares")
_PERCENT_ALIASES = (PERCENT_KEY, "percentage", "percent", "نسبة مئوية")

_FRACTION_RE = re.compile(r"^\s*(\d+)\s*/\s*(\d+)\s*$")
_INTEGER_RE = re.compile(r"^\s*(\d+)\s*$")
_PERCENT_RE = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*%?\s*$")
_CENT = Decimal("0.01")


# --- fractions --------------------------------------------------------------


def make_fraction(numerator: int, denominator: int) -> Fraction:
    """Reduced, sign-normalized share fraction. Shares are never negative."""
    if denominator == 0:
        raise FractionError(f"Zero denominator in {numerator}/{denominator}")
    value = Fraction(numerator, denominator)
    if value < 0:
        raise FractionError(f"Negative fraction {numerator}/{denominator}")
    return value


def format_fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    """Parse "n/d" (or a bare integer), accepting Arabic-Indic digits."""
    normalized = latin_digits(str(text))
    match = _FRACTION_RE.match(normalized)
    if match:
        return make_fraction(int(match.group(1)), int(match.group(2)))
    match = _INTEGER_RE.match(normalized)
    if match:
        return make_fraction(int(match.group(1)), 1)
    raise FractionError(f"Not a fraction: {text!r}")


def to_percentage(value: Fraction) -> Decimal:
    """Percentage rounded half-even to two decimals."""
    exact = Decimal(value.numerator * 100) / Decimal(value.denominator)
    return exact.quantize(_CENT, rounding=ROUND_HALF_EVEN)


def format_percentage(value: Decimal) -> str:
    return f"{value}%"


def parse_percentage(raw: Any) -> Optional[Decimal]:
    """Accept 25, 25.0, "25.0" and "25.0%"; None when unreadable."""
    if raw is None or isinstance(raw, bool):
        return None
    if isinstance(raw, (int, float)):
        value = Decimal(str(raw))
        # json.loads lets NaN and Infinity through
        return value if value.is_finite() else None
    match = _PERCENT_RE.match(latin_digits(str(raw)))
    if not match:
        return None
    try:
        return Decimal(match.group(1))
    except InvalidOperation:
        return None


# --- value types ------------------------------------------------------------


class Gender(str, Enum):
    MALE = "male"
    FEMALE = "female"


class KinshipClass(str, Enum):
    SPOUSE = "spouse"
    ASCENDANT = "ascendant"
    DESCENDANT = "descendant"
    COLLATERAL = "collateral"


@dataclass(frozen=True)
class HeirCategory:
    """One canonical heir label of the taxonomy."""

    canonical_label: str
    gender: Gender
    kinship_class: KinshipClass
    residuary_capable: bool
    note: str = ""

    @property
    def heads(self) -> int:
        """Weight in head-count sharing: a male counts twice."""
        return 2 if self.gender is Gender.MALE else 1

    def __str__(self) -> str:
        return self.canonical_label


class AdjustmentType(str, Enum):
    AWL = "عول"
    RADD = "رد"
    NONE = "لا"

    @classmethod
    def parse(cls, label: Any) -> Optional["AdjustmentType"]:
        """Exact member lookup on the cleaned label; None if unrecognised."""
        if not isinstance(label, str):
            return None
        cleaned = clean(label)
        for member in cls:
            if member.value == cleaned:
                return member
        return None


@dataclass(frozen=True)
class ShareValue:
    """Either a fixed fraction in (0, 1] or the residue designation."""

    fraction: Optional[Fraction] = None
    residue: bool = False

    def __post_init__(self):
        if (self.fraction is None) == (not self.residue):
            raise ContractViolation("ShareValue needs exactly one of fraction or residue")
        if self.fraction is not None and not (0 < self.fraction <= 1):
            raise FractionError(f"Share fraction out of range: {self.fraction}")

    @classmethod
    def of(cls, numerator: int, denominator: int) -> "ShareValue":
        return cls(fraction=make_fraction(numerator, denominator))

    @classmethod
    def parse(cls, text: Any) -> "ShareValue":
        if isinstance(text, str) and match_key(text) in _RESIDUE_PHRASES:
            return RESIDUE
        return cls(fraction=parse_fraction(text))

    @property
    def is_residue(self) -> bool:
        return self.residue

    def render(self) -> str:
        return RESIDUE_LABEL if self.residue else format_fraction(self.fraction)

    def __str__(self) -> str:
        return self.render()


RESIDUE = ShareValue(residue=True)


def sum_shares(shares: Iterable[ShareValue]) -> Fraction:
    """Exact sum of fixed shares. Residue markers must be filtered out first."""
    total = Fraction(0)
    for share in shares:
        if share.residue:
            raise ContractViolation("sum_shares got a residue marker")
        total += share.fraction
    return total


@dataclass(frozen=True)
class RelativeMention:
    """A heir label with the number of individuals it covers."""

    label: str
    count: int = 1

    def __post_init__(self):
        if not isinstance(self.count, int) or self.count < 1:
            raise ContractViolation(f"Count must be a positive integer, got {self.count!r}")

    @property
    def category(self) -> HeirCategory:
        from .taxonomy import default_taxonomy

        return default_taxonomy().resolve(self.label)

    def to_json(self) -> dict:
        return {HEIR_KEY: self.label, COUNT_KEY: self.count}


@dataclass(frozen=True)
class ShareEntry:
    """A shares row: heir, count and the share text as written."""

    label: str
    count: int
    value: Optional[ShareValue]
    raw: str

    @classmethod
    def of(cls, mention: RelativeMention, value: ShareValue) -> "ShareEntry":
        return cls(mention.label, mention.count, value, value.render())

    @property
    def mention(self) -> RelativeMention:
        return RelativeMention(self.label, self.count)

    def to_json(self) -> dict:
        return {HEIR_KEY: self.label, COUNT_KEY: self.count, FRACTION_KEY: self.raw}


@dataclass(frozen=True)
class DistributionEntry:
    """Final allocation for one heir category, per individual."""

    label: str
    count: int
    fraction: Optional[Fraction]
    percentage: Optional[Decimal]
    raw_fraction: str = ""
    raw_percentage: str = ""

    @property
    def collective(self) -> Optional[Fraction]:
        if self.fraction is None:
            return None
        return self.fraction * self.count

    def to_json(self) -> dict:
        return {
            HEIR_KEY: self.label,
            COUNT_KEY: self.count,
            FRACTION_KEY: self.raw_fraction,
            PERCENT_KEY: self.raw_percentage,
        }


@dataclass(frozen=True)
class PostTasil:
    total_shares: Optional[int]
    distribution: tuple[DistributionEntry, ...] = ()

    def allocation_sum(self) -> Optional[Fraction]:
        """Σ count × per-individual fraction, or None if any entry is unreadable."""
        total = Fraction(0)
        for entry in self.distribution:
            if entry.collective is None:
                return None
            total += entry.collective
        return total

    def is_conserved(self) -> bool:
        return self.allocation_sum() == 1

    def percentage_sum(self) -> Decimal:
        return sum(
            (e.percentage * e.count for e in self.distribution if e.percentage is not None),
            Decimal(0),
        )

    def entry(self, label: str) -> Optional[DistributionEntry]:
        for candidate in self.distribution:
            if candidate.label == label:
                return candidate
        return None

    def to_json(self) -> dict:
        return {
            "total_shares": self.total_shares,
            "distribution": [e.to_json() for e in self.distribution],
        }


@dataclass(frozen=True)
class SolutionRecord:
    """The five-field structured answer. Unknown keys ride along in `extra`."""

    heirs: tuple[RelativeMention, ...]
    blocked: tuple[RelativeMention, ...]
    shares: tuple[ShareEntry, ...]
    awl_or_radd: str
    post_tasil: PostTasil
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def adjustment(self) -> Optional[AdjustmentType]:
        return AdjustmentType.parse(self.awl_or_radd)

    def heir_labels(self) -> list[str]:
        return [m.label for m in self.heirs]

    def share_for(self, label: str) -> Optional[ShareEntry]:
        for entry in self.shares:
            if entry.label == label:
                return entry
        return None

    def with_changes(self, **changes: Any) -> "SolutionRecord":
        return replace(self, **changes)

    def to_json(self) -> dict:
        data = {
            "heirs": [m.to_json() for m in self.heirs],
            "blocked": [m.to_json() for m in self.blocked],
            "shares": [s.to_json() for s in self.shares],
            "awl_or_radd": self.awl_or_radd,
            "post_tasil": self.post_tasil.to_json(),
        }
        data.update(self.extra)
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False)

    @classmethod
    def from_json(cls, data: Any) -> "SolutionRecord":
        """Build a record from the task JSON, validating only structure."""
        if not isinstance(data, dict):
            raise ExtractionError("Solution JSON must be an object")
        missing = [key for key in REQUIRED_KEYS if key not in data]
        if missing:
            raise SchemaError(missing)
        post = data["post_tasil"]
        if not isinstance(post, dict):
            raise ExtractionError("post_tasil must be an object")
        extra = {k: v for k, v in data.items() if k not in REQUIRED_KEYS}
        return cls(
            heirs=tuple(_mention_from_json(item, "heirs") for item in _as_list(data["heirs"], "heirs")),
            blocked=tuple(_mention_from_json(item, "blocked") for item in _as_list(data["blocked"], "blocked")),
            shares=tuple(_share_from_json(item) for item in _as_list(data["shares"], "shares")),
            awl_or_radd=data["awl_or_radd"] if isinstance(data["awl_or_radd"], str) else str(data["awl_or_radd"]),
            post_tasil=PostTasil(
                total_shares=_optional_int(post.get("total_shares")),
                distribution=tuple(
                    _distribution_from_json(item)
                    for item in _as_list(post.get("distribution", []), "post_tasil.distribution")
                ),
            ),
            extra=extra,
        )

    @classmethod
    def loads(cls, text: str) -> "SolutionRecord":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ExtractionError(f"Invalid JSON: {e}") from e
        return cls.from_json(data)


# --- JSON helpers -----------------------------------------------------------


def _as_list(value: Any, where: str) -> list:
    if value is None:
        return []
    if not isinstance(value, list):
        raise ExtractionError(f"{where} must be a list")
    return value


def _pick(item: dict, aliases: tuple[str, ...]) -> Any:
    for key in aliases:
        if key in item:
            return item[key]
    return None


def _optional_int(raw: Any) -> Optional[int]:
    if isinstance(raw, bool):
        return None
    if isinstance(raw, int):
        return raw
    if isinstance(raw, str) and _INTEGER_RE.match(latin_digits(raw)):
        return int(latin_digits(raw))
    return None


def _label_and_count(item: Any, where: str) -> tuple[str, int]:
    if not isinstance(item, dict):
        raise ExtractionError(f"{where} entries must be objects")
    label = _pick(item, _HEIR_ALIASES)
    if not isinstance(label, str) or not label.strip():
        raise ExtractionError(f"{where} entry without a heir label")
    raw_count = _pick(item, _COUNT_ALIASES)
    count = 1 if raw_count is None else _optional_int(raw_count)
    if count is None or count < 1:
        raise ExtractionError(f"{where} entry {label!r} has invalid count {raw_count!r}")
    return label.strip(), count


def _mention_from_json(item: Any, where: str) -> RelativeMention:
    label, count = _label_and_count(item, where)
    return RelativeMention(label, count)


def _share_from_json(item: Any) -> ShareEntry:
    label, count = _label_and_count(item, "shares")
    raw = _pick(item, _FRACTION_ALIASES)
    raw_text = "" if raw is None else str(raw)
    try:
        value = ShareValue.parse(raw_text)
    except (FractionError, ContractViolation):
        value = None
    return ShareEntry(label, count, value, raw_text)


def _distribution_from_json(item: Any) -> DistributionEntry:
    label, count = _label_and_count(item, "post_tasil.distribution")
    raw_fraction = _pick(item, _FRACTION_ALIASES)
    raw_percentage = _pick(item, _PERCENT_ALIASES)
    try:
        fraction = parse_fraction(raw_fraction) if raw_fraction is not None else None
    except FractionError:
        fraction = None
    return DistributionEntry(
        label=label,
        count=count,
        fraction=fraction,
        percentage=parse_percentage(raw_percentage),
        raw_fraction="" if raw_fraction is None else str(raw_fraction),
        raw_percentage="" if raw_percentage is None else str(raw_percentage),
    )
