import json

import pytest

from core.analysis import (
    aggregate,
    aggregate_frame,
    complexity_bucket,
    failed_case,
    results_frame,
    score_case,
)
from core.errors import AggregationError, SchemaError
from core.mire import ErrorCategory, MireWeights


def _row(case_id, s_h=1.0, s_s=1.0, s_a=1.0, s_f=1.0, mire=None, category="simple", error="none", residue=None, mentioned=3):
    if mire is None:
        mire = 0.3 * s_h + 0.3 * s_s + 0.1 * s_a + 0.3 * s_f
    return {
        "id": case_id,
        "s_h": s_h,
        "s_s": s_s,
        "s_a": s_a,
        "s_f": s_f,
        "mire": mire,
        "category": category,
        "error": error,
        "residue": residue,
        "mentioned": mentioned,
    }


@pytest.fixture
def pipeline_rows():
    rows = [_row(f"p{i}") for i in range(655)]
    rows += [_row(f"f{i}", s_f=0.0, error="calculation") for i in range(139)]
    rows += [_row(f"a{i}", s_a=0.0, s_f=0.0, error="calculation") for i in range(18)]
    rows += [_row(f"s{i}", s_s=0.5, s_a=0.0, error="share_assignment") for i in range(28)]
    rows += [_row(f"h{i}", s_h=0.5, s_a=0.0, error="heir_identification") for i in range(160)]
    return rows


def test_overall_mean_of_mixed_batch():
    rows = [_row(f"p{i}") for i in range(655)]
    rows += [_row(f"q{i}", mire=0.71, error="share_assignment") for i in range(345)]
    report = aggregate_frame(results_frame(rows))
    assert 0.899 <= report.means["mire"] <= 0.901
    assert report.means["mire"] == pytest.approx(0.89995)


def test_pipeline_rates(pipeline_rows):
    pipeline = aggregate_frame(results_frame(pipeline_rows)).pipeline
    assert list(pipeline["cases"]) == [840, 812, 794, 655]
    assert list(pipeline["rate"]) == pytest.approx([84.0, 81.2, 79.4, 65.5])
    assert pipeline.index[-1] == "All stages correct"


def test_pipeline_is_non_increasing(pipeline_rows):
    rates = list(aggregate_frame(results_frame(pipeline_rows)).pipeline["rate"])
    assert rates == sorted(rates, reverse=True)


def test_error_table(pipeline_rows):
    errors = aggregate_frame(results_frame(pipeline_rows)).errors
    assert errors.loc["calculation", "cases"] == 157
    assert errors.loc["heir_identification", "share"] == pytest.approx(16.0)
    assert not errors.loc["calculation", "overlapping"]
    assert "none" not in errors.index


def test_residue_avoidance_impact():
    rows = [_row(f"c{i}", residue="avoided_correct", s_s=0.9775) for i in range(63)]
    rows += [_row(f"p{i}", residue="provided") for i in range(20)]
    rows += [_row(f"n{i}") for i in range(17)]
    report = aggregate_frame(results_frame(rows))
    row = report.errors.loc["residue_avoidance_all"]
    assert row["cases"] == 63
    assert row["overlapping"]
    assert row["impact_pp"] == pytest.approx(-0.8505)


def test_residue_impact_follows_share_weight():
    rows = [_row(f"c{i}", residue="avoided_wrong") for i in range(10)]
    weights = MireWeights.parse("0.25,0.5,0.0,0.25")
    report = aggregate_frame(results_frame(rows), weights)
    assert report.errors.loc["residue_avoidance_all", "impact_pp"] == pytest.approx(-100 * 0.045 * 0.5)


def test_residue_table():
    rows = [_row("a", residue="provided"), _row("b", residue="avoided_correct"), _row("c", residue="avoided_wrong"), _row("d")]
    residue = aggregate_frame(results_frame(rows)).residue
    assert residue.loc["Gold requires residue label", "cases"] == 3
    assert residue.loc["Gold requires residue label", "rate"] == pytest.approx(75.0)
    assert residue.loc["Model avoids label", "rate"] == pytest.approx(200.0 / 3)
    assert residue.loc["of which: correct fraction", "rate"] == pytest.approx(50.0)


def test_per_category_order():
    rows = [_row("a", category="رد"), _row("b", category="simple"), _row("c", category="عول", mire=0.5)]
    per_category = aggregate_frame(results_frame(rows)).per_category
    assert list(per_category.index) == ["simple", "عول", "رد"]
    assert per_category.loc["عول", "mire"] == pytest.approx(50.0)


@pytest.mark.parametrize("mentioned, bucket", [(2, "2-4"), (4, "2-4"), (5, "5-7"), (7, "5-7"), (8, "8+"), (15, "8+")])
def test_complexity_bucket(mentioned, bucket):
    assert complexity_bucket(mentioned) == bucket


def test_complexity_table():
    rows = [_row("a", mentioned=10, mire=0.5), _row("b", mentioned=3), _row("c", mentioned=9, mire=0.7)]
    complexity = aggregate_frame(results_frame(rows)).complexity
    assert list(complexity.index) == ["2-4", "8+"]
    assert complexity.loc["8+", "cases"] == 2
    assert complexity.loc["8+", "mire"] == pytest.approx(60.0)


def test_empty_results():
    with pytest.raises(AggregationError):
        results_frame([])
    with pytest.raises(AggregationError):
        aggregate([])


def test_missing_columns():
    with pytest.raises(SchemaError):
        results_frame([{"id": "a", "mire": 1.0}])


def test_score_case_row(case2_gold, table2_gold):
    scored = score_case("c2", case2_gold, case2_gold)
    row = scored.to_json()
    assert row["mire"] == 1.0
    assert row["category"] == "simple"
    assert row["residue"] == "provided"
    assert row["mentioned"] == 7
    assert score_case("t2", table2_gold, table2_gold).residue is None


def test_failed_case(case2_gold):
    scored = failed_case("x", case2_gold)
    assert scored.components.mire == 0
    assert scored.error is ErrorCategory.HEIR_IDENTIFICATION
    assert scored.residue == "avoided_wrong"


def test_aggregate_scored_cases(case2_gold, case3_gold):
    report = aggregate([score_case("a", case2_gold, case2_gold), failed_case("b", case3_gold)])
    assert report.n_cases == 2
    assert report.means["mire"] == pytest.approx(0.5)
    data = report.to_json()
    assert data["n_cases"] == 2
    assert json.dumps(data, ensure_ascii=False)
