from core.analysis import aggregate, failed_case, score_case
from tools.tables import pipeline_table, render_report, variant_table


def _report(case2_gold, case3_gold):
    return aggregate([score_case("a", case2_gold, case2_gold), failed_case("b", case3_gold)])


def test_report_sections(case2_gold, case3_gold):
    text = render_report(_report(case2_gold, case3_gold), timestamp=False)
    for heading in ("## Overall", "## By category", "## Pipeline success", "## Residue label", "## Errors", "## Complexity"):
        assert heading in text
    assert "## Post-processing variants" not in text
    assert "Generated" not in text
    assert "Cases: 2" in text


def test_report_timestamp(case2_gold, case3_gold):
    assert "Generated: " in render_report(_report(case2_gold, case3_gold))


def test_pipeline_table_rates(case2_gold, case3_gold):
    table = pipeline_table(_report(case2_gold, case3_gold))
    assert "| All stages correct" in table
    assert "50.0" in table


def test_variant_table_columns():
    means = {
        "original": {"s_h": 0.5, "s_s": 0.5, "s_a": 0.0, "s_f": 0.0, "mire": 0.3},
        "basic": {"s_h": 1.0, "s_s": 1.0, "s_a": 1.0, "s_f": 0.0, "mire": 0.7},
    }
    table = variant_table(means)
    header = table.splitlines()[0]
    assert "original" in header and "basic" in header
    assert "70.0" in table
