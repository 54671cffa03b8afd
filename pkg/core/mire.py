"""
MIR-E: a weighted sum of four component scores.

    s_h  heirs and blocking: F1 over (role, label) decisions x count accuracy
    s_s  shares: mean per gold share entry
    s_a  adjustment label, gated on s_h = s_s = 1
    s_f  final distribution: gold entries whose percentage is within tolerance

Components are exact Fractions; the weighted score is a Decimal.
"""

from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .domain import AdjustmentType, ShareEntry, SolutionRecord, to_percentage

Number = Union[Fraction, Decimal, int, float]

DEFAULT_TOLERANCE = Decimal("0.05")
# Credit for a numerically correct fraction written where the residue label is expected.
RESIDUE_PARTIAL_CREDIT = Fraction(955, 1000)

RESIDUE_PROVIDED = "provided"
RESIDUE_AVOIDED_CORRECT = "avoided_correct"
RESIDUE_AVOIDED_WRONG = "avoided_wrong"


def _to_decimal(value: Number) -> Decimal:
    if isinstance(value, Fraction):
        return Decimal(value.numerator) / Decimal(value.denominator)
    if isinstance(value, Decimal):
        return value
    return Decimal(str(value))


@dataclass(frozen=True)
class MireWeights:
    alpha_h: Decimal = Decimal("0.30")
    alpha_s: Decimal = Decimal("0.30")
    alpha_a: Decimal = Decimal("0.10")
    alpha_f: Decimal = Decimal("0.30")

    def __post_init__(self):
        for name in ("alpha_h", "alpha_s", "alpha_a", "alpha_f"):
            value = _to_decimal(getattr(self, name))
            if value < 0:
                raise ValueError(f"Weight {name} must be non-negative, got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def parse(cls, text: str) -> "MireWeights":
        """"0.3,0.3,0.1,0.3" in h, s, a, f order."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if len(parts) != 4:
            raise ValueError(f"Expected four comma-separated weights, got {text!r}")
        try:
            return cls(*(Decimal(p) for p in parts))
        except ArithmeticError as e:
            raise ValueError(f"Invalid weight in {text!r}") from e

    def as_tuple(self) -> tuple[Decimal, Decimal, Decimal, Decimal]:
        return (self.alpha_h, self.alpha_s, self.alpha_a, self.alpha_f)

    @property
    def total(self) -> Decimal:
        return sum(self.as_tuple(), Decimal(0))

    def normalized(self) -> "MireWeights":
        total = self.total
        if total == 0:
            raise ValueError("Weights sum to zero")
        return MireWeights(*(w / total for w in self.as_tuple()))


DEFAULT_WEIGHTS = MireWeights()


class ErrorCategory(str, Enum):
    NONE = "none"
    CALCULATION = "calculation"
    HEIR_IDENTIFICATION = "heir_identification"
    RADD_DETECTION = "radd_detection"
    SHARE_ASSIGNMENT = "share_assignment"
    RESIDUE_LABEL_AVOIDANCE = "residue_label_avoidance"


@dataclass(frozen=True)
class MireComponents:
    s_h: Fraction
    s_s: Fraction
    s_a: Fraction
    s_f: Fraction
    mire: Decimal

    @property
    def is_perfect(self) -> bool:
        return self.s_h == self.s_s == self.s_a == self.s_f == 1

    def as_floats(self) -> dict[str, float]:
        return {
            "s_h": float(self.s_h),
            "s_s": float(self.s_s),
            "s_a": float(self.s_a),
            "s_f": float(self.s_f),
            "mire": float(self.mire),
        }


def weighted_score(s_h: Number, s_s: Number, s_a: Number, s_f: Number, weights: MireWeights = DEFAULT_WEIGHTS) -> Decimal:
    """alpha_h*s_h + alpha_s*s_s + alpha_a*s_a + alpha_f*s_f in decimal arithmetic."""
    components = (s_h, s_s, s_a, s_f)
    return sum((w * _to_decimal(c) for w, c in zip(weights.as_tuple(), components)), Decimal(0))


def _decisions(record: SolutionRecord) -> dict[tuple[str, str], int]:
    decisions: dict[tuple[str, str], int] = {}
    for role, mentions in (("heir", record.heirs), ("blocked", record.blocked)):
        for mention in mentions:
            key = (role, mention.label.strip())
            decisions[key] = decisions.get(key, 0) + mention.count
    return decisions


def score_heirs(pred: SolutionRecord, gold: SolutionRecord) -> Fraction:
    gold_decisions = _decisions(gold)
    pred_decisions = _decisions(pred)
    if not gold_decisions and not pred_decisions:
        return Fraction(1)
    if not gold_decisions or not pred_decisions:
        return Fraction(0)
    matched = gold_decisions.keys() & pred_decisions.keys()
    if not matched:
        return Fraction(0)
    f1 = Fraction(2 * len(matched), len(gold_decisions) + len(pred_decisions))
    count_accuracy = Fraction(sum(1 for k in matched if gold_decisions[k] == pred_decisions[k]), len(matched))
    return f1 * count_accuracy


def _gold_collective(gold: SolutionRecord, label: str) -> Optional[Fraction]:
    entry = gold.post_tasil.entry(label)
    return entry.collective if entry is not None else None


def _within(a: Fraction, b: Fraction, tolerance: Decimal) -> bool:
    return abs(to_percentage(a) - to_percentage(b)) <= tolerance


def _share_credit(pred_entry: Optional[ShareEntry], gold_entry: ShareEntry, gold: SolutionRecord, tolerance: Decimal) -> Fraction:
    if pred_entry is None or pred_entry.value is None or gold_entry.value is None:
        return Fraction(0)
    pred_value, gold_value = pred_entry.value, gold_entry.value
    if gold_value.residue:
        if pred_value.residue:
            return Fraction(1)
        actual = _gold_collective(gold, gold_entry.label)
        if actual is not None and _within(pred_value.fraction, actual, tolerance):
            return RESIDUE_PARTIAL_CREDIT
        return Fraction(0)
    if pred_value.residue:
        return Fraction(0)
    return Fraction(1) if pred_value.fraction == gold_value.fraction else Fraction(0)


def score_shares(pred: SolutionRecord, gold: SolutionRecord, tolerance: Decimal = DEFAULT_TOLERANCE) -> Fraction:
    if not gold.shares:
        return Fraction(1) if not pred.shares else Fraction(0)
    credits = [_share_credit(pred.share_for(g.label), g, gold, tolerance) for g in gold.shares]
    return sum(credits, Fraction(0)) / len(credits)


def score_adjustment(pred: SolutionRecord, gold: SolutionRecord, s_h: Fraction, s_s: Fraction) -> Fraction:
    if s_h != 1 or s_s != 1:
        return Fraction(0)
    return Fraction(1) if pred.awl_or_radd.strip() == gold.awl_or_radd.strip() else Fraction(0)


def _percentage_of(entry) -> Optional[Decimal]:
    if entry.percentage is not None:
        return entry.percentage
    if entry.fraction is not None:
        return to_percentage(entry.fraction)
    return None


def score_final(pred: SolutionRecord, gold: SolutionRecord, tolerance: Decimal = DEFAULT_TOLERANCE) -> Fraction:
    gold_entries = gold.post_tasil.distribution
    if not gold_entries:
        return Fraction(1) if not pred.post_tasil.distribution else Fraction(0)
    hits = 0
    for gold_entry in gold_entries:
        pred_entry = pred.post_tasil.entry(gold_entry.label)
        if pred_entry is None:
            continue
        expected, actual = _percentage_of(gold_entry), _percentage_of(pred_entry)
        if expected is not None and actual is not None and abs(expected - actual) <= tolerance:
            hits += 1
    return Fraction(hits, len(gold_entries))


def mire(
    pred: SolutionRecord,
    gold: SolutionRecord,
    weights: MireWeights = DEFAULT_WEIGHTS,
    tolerance: Decimal = DEFAULT_TOLERANCE,
) -> MireComponents:
    s_h = score_heirs(pred, gold)
    s_s = score_shares(pred, gold, tolerance)
    s_a = score_adjustment(pred, gold, s_h, s_s)
    s_f = score_final(pred, gold, tolerance)
    return MireComponents(s_h, s_s, s_a, s_f, weighted_score(s_h, s_s, s_a, s_f, weights))


def residue_behaviour(pred: SolutionRecord, gold: SolutionRecord, tolerance: Decimal = DEFAULT_TOLERANCE) -> Optional[str]:
    """How the prediction treats gold residue entries; None when gold has none."""
    required = [g for g in gold.shares if g.value is not None and g.value.residue]
    if not required:
        return None
    credits = [_share_credit(pred.share_for(g.label), g, gold, tolerance) for g in required]
    if all(c == 1 for c in credits):
        return RESIDUE_PROVIDED
    if all(c > 0 for c in credits):
        return RESIDUE_AVOIDED_CORRECT
    return RESIDUE_AVOIDED_WRONG


def gold_category(gold: SolutionRecord) -> str:
    """simple, عول or رد, from the gold adjustment label."""
    label = gold.adjustment
    if label in (AdjustmentType.AWL, AdjustmentType.RADD):
        return label.value
    return "simple"


def categorize_error(
    pred: SolutionRecord,
    gold: SolutionRecord,
    components: MireComponents,
    tolerance: Decimal = DEFAULT_TOLERANCE,
) -> ErrorCategory:
    """Single error category per case; checks run in a fixed priority order."""
    if components.is_perfect:
        return ErrorCategory.NONE
    if gold.adjustment is AdjustmentType.RADD and pred.adjustment is AdjustmentType.NONE:
        return ErrorCategory.RADD_DETECTION
    if components.s_h == components.s_s == components.s_a == 1:
        return ErrorCategory.CALCULATION
    if components.s_h < 1:
        pred_heirs = {m.label.strip() for m in pred.heirs}
        missing_heir = any(m.label.strip() not in pred_heirs for m in gold.heirs)
        if components.s_s == 1 or missing_heir:
            return ErrorCategory.HEIR_IDENTIFICATION
    if components.s_s < 1:
        if residue_behaviour(pred, gold, tolerance) == RESIDUE_AVOIDED_CORRECT:
            residue_labels = {g.label for g in gold.shares if g.value is not None and g.value.residue}
            others_right = all(
                _share_credit(pred.share_for(g.label), g, gold, tolerance) == 1
                for g in gold.shares
                if g.label not in residue_labels
            )
            if others_right:
                return ErrorCategory.RESIDUE_LABEL_AVOIDANCE
        return ErrorCategory.SHARE_ASSIGNMENT
    # Adjustment label wrong with everything upstream right, other than missed radd.
    return ErrorCategory.CALCULATION
