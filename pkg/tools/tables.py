"""
Plain-text rendering of the evaluation report with tabulate.
"""

from datetime import datetime, timezone
from typing import Optional

from tabulate import tabulate

from core.analysis import COMPONENTS, AnalysisReport

COMPONENT_NAMES = {
    "s_h": "Heirs & Blocking",
    "s_s": "Shares",
    "s_a": "Adjustment",
    "s_f": "Final Distribution",
    "mire": "MIR-E",
}
TABLE_FORMAT = "github"


def _table(rows, headers, floatfmt: str = ".1f") -> str:
    return tabulate(rows, headers=headers, tablefmt=TABLE_FORMAT, floatfmt=floatfmt)


def variant_table(means_by_variant: dict[str, dict[str, float]]) -> str:
    """Component means (in %) per pipeline variant, one column per variant."""
    variants = list(means_by_variant)
    rows = [
        [COMPONENT_NAMES[c], *(100.0 * means_by_variant[v][c] for v in variants)]
        for c in COMPONENTS
    ]
    return _table(rows, ["Component", *variants])


def category_table(report: AnalysisReport) -> str:
    frame = report.per_category
    rows = [
        [category, int(row["cases"]), *(row[c] for c in COMPONENTS)]
        for category, row in frame.iterrows()
    ]
    return _table(rows, ["Category", "Cases", *(COMPONENT_NAMES[c] for c in COMPONENTS)])


def pipeline_table(report: AnalysisReport) -> str:
    rows = [[stage, int(row["cases"]), row["rate"]] for stage, row in report.pipeline.iterrows()]
    return _table(rows, ["Stage", "Cases", "Rate (%)"])


def residue_table(report: AnalysisReport) -> str:
    rows = [
        [behaviour, int(row["cases"]), row["rate"], row["base"]]
        for behaviour, row in report.residue.iterrows()
    ]
    return _table(rows, ["Behaviour", "Cases", "Rate (%)", "Base"])


def error_table(report: AnalysisReport) -> str:
    rows = []
    for error, row in report.errors.iterrows():
        name = f"{error} (overlapping)" if row["overlapping"] else error
        rows.append([name, int(row["cases"]), row["share"], row["impact_pp"]])
    return _table(rows, ["Error category", "Cases", "Share (%)", "Impact (pp)"], floatfmt=".2f")


def complexity_table(report: AnalysisReport) -> str:
    rows = [[bucket, int(row["cases"]), row["mire"]] for bucket, row in report.complexity.iterrows()]
    return _table(rows, ["Mentioned categories", "Cases", "MIR-E (%)"])


def render_report(
    report: AnalysisReport,
    variants: Optional[dict[str, dict[str, float]]] = None,
    title: str = "MIR-E evaluation report",
    timestamp: bool = True,
) -> str:
    """
    Full text report. With `timestamp=False` the output is a pure function
    of its inputs.
    """
    sections = [f"# {title}"]
    if timestamp:
        sections.append(f"Generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}")
    sections.append(f"Cases: {report.n_cases}")
    overall = [[COMPONENT_NAMES[c], 100.0 * report.means[c]] for c in COMPONENTS]
    sections += ["## Overall", _table(overall, ["Component", "Score (%)"])]
    if variants:
        sections += ["## Post-processing variants", variant_table(variants)]
    sections += [
        "## By category", category_table(report),
        "## Pipeline success", pipeline_table(report),
        "## Residue label", residue_table(report),
        "## Errors", error_table(report),
        "## Complexity", complexity_table(report),
    ]
    return "\n\n".join(sections) + "\n"
