import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from core.domain import SolutionRecord  # noqa: E402
from tests.worked_cases import CASE2_GOLD, CASE3_GOLD, CASE4_GOLD, TABLE2_GOLD  # noqa: E402


@pytest.fixture
def table2_gold() -> SolutionRecord:
    return SolutionRecord.from_json(TABLE2_GOLD)


@pytest.fixture
def case2_gold() -> SolutionRecord:
    return SolutionRecord.from_json(CASE2_GOLD)


@pytest.fixture
def case3_gold() -> SolutionRecord:
    return SolutionRecord.from_json(CASE3_GOLD)


@pytest.fixture
def case4_gold() -> SolutionRecord:
    return SolutionRecord.from_json(CASE4_GOLD)
