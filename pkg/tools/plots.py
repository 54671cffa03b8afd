"""
Report figures: pipeline success rates, per-category component means and
MIR-E by case complexity.
"""

from pathlib import Path
import logging

from core.analysis import COMPONENTS, AnalysisReport

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import seaborn as sns
except ImportError:
    plt = None  # type: ignore
    sns = None  # type: ignore

logger = logging.getLogger(__name__)


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    logger.info("wrote %s", path)
    return path


def pipeline_figure(report: AnalysisReport, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 3.5))
    data = report.pipeline.reset_index()
    sns.barplot(data=data, x="rate", y="stage", color="steelblue", ax=ax)
    ax.set_xlim(0, 100)
    ax.set_xlabel("Cases correct (%)")
    ax.set_ylabel("")
    return _save(fig, path)


def category_figure(report: AnalysisReport, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 3))
    sns.heatmap(
        report.per_category[list(COMPONENTS)],
        annot=True,
        fmt=".1f",
        vmin=0,
        vmax=100,
        cmap="viridis",
        ax=ax,
    )
    ax.set_ylabel("")
    return _save(fig, path)


def complexity_figure(report: AnalysisReport, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    data = report.complexity.reset_index()
    sns.barplot(data=data, x="mentioned", y="mire", color="seagreen", ax=ax)
    ax.set_ylim(0, 100)
    ax.set_xlabel("Mentioned categories")
    ax.set_ylabel("MIR-E (%)")
    return _save(fig, path)


def write_figures(report: AnalysisReport, figures_dir: Path) -> list[Path]:
    """
    Write the three report figures as PNG files.
    :return: Paths written, in a fixed order.
    """
    if plt is None or sns is None:
        raise ImportError("matplotlib and seaborn are required for figures. Install with: pip install matplotlib seaborn")
    figures_dir = Path(figures_dir)
    figures_dir.mkdir(parents=True, exist_ok=True)
    return [
        pipeline_figure(report, figures_dir / "pipeline_success.png"),
        category_figure(report, figures_dir / "category_components.png"),
        complexity_figure(report, figures_dir / "complexity.png"),
    ]
