"""
Batch scoring results and the aggregate analyses built from them.
"""

from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Iterable, Optional
import json
import logging

import pandas as pd

from .domain import SolutionRecord
from .errors import AggregationError, SchemaError
from .mire import (
    DEFAULT_TOLERANCE,
    DEFAULT_WEIGHTS,
    RESIDUE_AVOIDED_CORRECT,
    RESIDUE_AVOIDED_WRONG,
    RESIDUE_PARTIAL_CREDIT,
    RESIDUE_PROVIDED,
    ErrorCategory,
    MireComponents,
    MireWeights,
    categorize_error,
    gold_category,
    mire,
    residue_behaviour,
)

logger = logging.getLogger(__name__)

COMPONENTS = ("s_h", "s_s", "s_a", "s_f", "mire")
RESULT_FIELDS = ("id", *COMPONENTS, "category", "error", "residue", "mentioned")
CATEGORY_ORDER = ("simple", "عول", "رد")
COMPLEXITY_BUCKETS = ("2-4", "5-7", "8+")
PIPELINE_STAGES = (
    ("Heirs correct", ("s_h",)),
    ("+ Shares correct", ("s_h", "s_s")),
    ("+ Adjustment correct", ("s_h", "s_s", "s_a")),
    ("All stages correct", ("s_h", "s_s", "s_a", "s_f")),
)


def complexity_bucket(mentioned: int) -> str:
    if mentioned <= 4:
        return "2-4"
    if mentioned <= 7:
        return "5-7"
    return "8+"


@dataclass
class ScoredCase:
    """One evaluated case: components plus the labels the analyses group by."""

    case_id: str
    components: MireComponents
    category: str
    error: ErrorCategory
    residue: Optional[str] = None
    mentioned: int = 0

    def to_json(self) -> dict:
        row: dict[str, Any] = {"id": self.case_id}
        row.update(self.components.as_floats())
        row.update(
            {
                "category": self.category,
                "error": self.error.value,
                "residue": self.residue,
                "mentioned": self.mentioned,
            }
        )
        return row


def score_case(
    case_id: str,
    pred: SolutionRecord,
    gold: SolutionRecord,
    weights: MireWeights = DEFAULT_WEIGHTS,
    tolerance: Decimal = DEFAULT_TOLERANCE,
) -> ScoredCase:
    components = mire(pred, gold, weights, tolerance)
    return ScoredCase(
        case_id=case_id,
        components=components,
        category=gold_category(gold),
        error=categorize_error(pred, gold, components, tolerance),
        residue=residue_behaviour(pred, gold, tolerance),
        mentioned=len(gold.heirs) + len(gold.blocked),
    )


def failed_case(case_id: str, gold: SolutionRecord) -> ScoredCase:
    """A prediction that could not be extracted or scored counts as zero everywhere."""
    zero = Fraction(0)
    return ScoredCase(
        case_id=case_id,
        components=MireComponents(zero, zero, zero, zero, Decimal(0)),
        category=gold_category(gold),
        error=ErrorCategory.HEIR_IDENTIFICATION,
        residue=RESIDUE_AVOIDED_WRONG if any(s.value is not None and s.value.residue for s in gold.shares) else None,
        mentioned=len(gold.heirs) + len(gold.blocked),
    )


@dataclass
class AnalysisReport:
    n_cases: int
    means: dict[str, float]
    per_category: pd.DataFrame
    pipeline: pd.DataFrame
    residue: pd.DataFrame
    errors: pd.DataFrame
    complexity: pd.DataFrame
    extra: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        def records(frame: pd.DataFrame) -> list[dict]:
            return json.loads(frame.reset_index().to_json(orient="records", force_ascii=False))

        return {
            "n_cases": self.n_cases,
            "means": self.means,
            "per_category": records(self.per_category),
            "pipeline": records(self.pipeline),
            "residue": records(self.residue),
            "errors": records(self.errors),
            "complexity": records(self.complexity),
            **self.extra,
        }


def results_frame(rows: Iterable[dict]) -> pd.DataFrame:
    """DataFrame of result rows, checking the columns aggregate relies on."""
    frame = pd.DataFrame(list(rows))
    if frame.empty:
        raise AggregationError("No results to aggregate")
    missing = [c for c in RESULT_FIELDS if c not in frame.columns]
    if missing:
        raise SchemaError(missing)
    for column in COMPONENTS:
        frame[column] = frame[column].astype(float)
    frame["mentioned"] = frame["mentioned"].fillna(0).astype(int)
    return frame


def _is_one(series: pd.Series) -> pd.Series:
    return (series - 1.0).abs() < 1e-9


def _pipeline(frame: pd.DataFrame) -> pd.DataFrame:
    rows = []
    for name, columns in PIPELINE_STAGES:
        mask = pd.Series(True, index=frame.index)
        for column in columns:
            mask &= _is_one(frame[column])
        rows.append({"stage": name, "cases": int(mask.sum()), "rate": 100.0 * mask.mean()})
    return pd.DataFrame(rows).set_index("stage")


def _per_category(frame: pd.DataFrame) -> pd.DataFrame:
    grouped = frame.groupby("category")[list(COMPONENTS)].mean() * 100.0
    grouped.insert(0, "cases", frame.groupby("category").size())
    order = [c for c in CATEGORY_ORDER if c in grouped.index] + [c for c in grouped.index if c not in CATEGORY_ORDER]
    return grouped.loc[order]


def _residue(frame: pd.DataFrame) -> pd.DataFrame:
    n = len(frame)
    required = int(frame["residue"].notna().sum())
    provided = int((frame["residue"] == RESIDUE_PROVIDED).sum())
    correct = int((frame["residue"] == RESIDUE_AVOIDED_CORRECT).sum())
    wrong = int((frame["residue"] == RESIDUE_AVOIDED_WRONG).sum())
    avoided = correct + wrong

    def pct(part: int, whole: int) -> float:
        return 100.0 * part / whole if whole else 0.0

    rows = [
        ("Gold requires residue label", required, pct(required, n), "of test"),
        ("Model provides label (recall)", provided, pct(provided, required), "of required"),
        ("Model avoids label", avoided, pct(avoided, required), "of required"),
        ("of which: correct fraction", correct, pct(correct, avoided), "of avoided"),
        ("of which: wrong fraction", wrong, pct(wrong, avoided), "of avoided"),
    ]
    return pd.DataFrame(rows, columns=["behaviour", "cases", "rate", "base"]).set_index("behaviour")


def _errors(frame: pd.DataFrame, weights: MireWeights) -> pd.DataFrame:
    n = len(frame)
    rows = []
    for category in ErrorCategory:
        if category is ErrorCategory.NONE:
            continue
        subset = frame[frame["error"] == category.value]
        rows.append(
            {
                "error": category.value,
                "cases": len(subset),
                "share": 100.0 * len(subset) / n,
                "impact_pp": -100.0 * float((1.0 - subset["mire"]).sum()) / n,
                "overlapping": False,
            }
        )
    # Residue avoidance cuts across the categories above; not added to their total.
    avoided = int(frame["residue"].isin([RESIDUE_AVOIDED_CORRECT, RESIDUE_AVOIDED_WRONG]).sum())
    loss = float((1 - RESIDUE_PARTIAL_CREDIT) * Fraction(str(weights.alpha_s)))
    rows.append(
        {
            "error": "residue_avoidance_all",
            "cases": avoided,
            "share": 100.0 * avoided / n,
            "impact_pp": -100.0 * avoided / n * loss,
            "overlapping": True,
        }
    )
    return pd.DataFrame(rows).set_index("error")


def _complexity(frame: pd.DataFrame) -> pd.DataFrame:
    buckets = frame["mentioned"].map(complexity_bucket)
    grouped = frame.groupby(buckets)["mire"].agg(["size", "mean"])
    grouped.columns = ["cases", "mire"]
    grouped["mire"] *= 100.0
    grouped.index.name = "mentioned"
    return grouped.reindex([b for b in COMPLEXITY_BUCKETS if b in grouped.index])


def aggregate_frame(frame: pd.DataFrame, weights: MireWeights = DEFAULT_WEIGHTS) -> AnalysisReport:
    if frame.empty:
        raise AggregationError("No results to aggregate")
    means = {c: float(frame[c].mean()) for c in COMPONENTS}
    logger.debug("aggregated %d cases, mean MIR-E %.4f", len(frame), means["mire"])
    return AnalysisReport(
        n_cases=len(frame),
        means=means,
        per_category=_per_category(frame),
        pipeline=_pipeline(frame),
        residue=_residue(frame),
        errors=_errors(frame, weights),
        complexity=_complexity(frame),
    )


def aggregate(results: Iterable[ScoredCase], weights: MireWeights = DEFAULT_WEIGHTS) -> AnalysisReport:
    """
    Fold scored cases into the report: component means, per-category table,
    cumulative pipeline rates, residue behaviour, error distribution and
    complexity buckets.

    :raises AggregationError: no results.
    """
    rows = [r.to_json() for r in results]
    if not rows:
        raise AggregationError("No results to aggregate")
    return aggregate_frame(results_frame(rows), weights)
