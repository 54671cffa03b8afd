# Mawarith core: domain model, rule tables, solver, repair, MIR-E scoring

from .domain import (
    AdjustmentType,
    DistributionEntry,
    PostTasil,
    RelativeMention,
    ShareEntry,
    ShareValue,
    SolutionRecord,
)
from .taxonomy import Taxonomy, default_taxonomy
from .rule_tables import RuleBook, default_rulebook, load_rulebook
from .case_parser import CaseScenario, parse_case
from .solver import FiqhSolver, SolverConfig, solve_case
from .postprocessor import VALID_VARIANTS, repair, run_pipeline
from .mire import DEFAULT_WEIGHTS, MireWeights, mire
from .analysis import AnalysisReport, aggregate, score_case
from .batch import BatchRunner, CaseResult

__all__ = [
    "AdjustmentType",
    "DistributionEntry",
    "PostTasil",
    "RelativeMention",
    "ShareEntry",
    "ShareValue",
    "SolutionRecord",
    "Taxonomy",
    "default_taxonomy",
    "RuleBook",
    "default_rulebook",
    "load_rulebook",
    "CaseScenario",
    "parse_case",
    "FiqhSolver",
    "SolverConfig",
    "solve_case",
    "VALID_VARIANTS",
    "repair",
    "run_pipeline",
    "DEFAULT_WEIGHTS",
    "MireWeights",
    "mire",
    "AnalysisReport",
    "aggregate",
    "score_case",
    "BatchRunner",
    "CaseResult",
]
