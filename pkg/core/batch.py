"""
Batch runner: applies a per-case function to many cases, optionally on a
thread pool, and collects one CaseResult per case in input order.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence
import logging

from .errors import MawarithError

logger = logging.getLogger(__name__)


@dataclass
class CaseResult:
    """Result of processing a single case."""

    case_id: str
    value: Any = None
    error: Optional[str] = None
    error_type: str = ""

    @property
    def success(self) -> bool:
        return self.error is None

    def summary(self) -> str:
        lines = [f"Case: {self.case_id}", f"Success: {self.success}"]
        if self.error:
            lines.append(f"{self.error_type}: {self.error}")
        return "\n".join(lines)


class BatchRunner:
    """
    Runs a function over (case_id, item) pairs. Failures are captured per
    case so one bad case never stops the batch.
    """

    def __init__(self, workers: int = 1):
        """
        :param workers: Thread count; 1 runs inline.
        """
        if workers < 1:
            raise ValueError(f"workers must be at least 1, got {workers}")
        self.workers = workers

    def run_one(self, case_id: str, item: Any, func: Callable[[Any], Any]) -> CaseResult:
        try:
            return CaseResult(case_id=case_id, value=func(item))
        except MawarithError as e:
            logger.warning("case %s failed: %s", case_id, e)
            return CaseResult(case_id=case_id, error=str(e), error_type=type(e).__name__)
        except Exception as e:
            logger.exception("case %s raised unexpectedly", case_id)
            return CaseResult(case_id=case_id, error=str(e), error_type=type(e).__name__)

    def run(self, items: Sequence[tuple[str, Any]], func: Callable[[Any], Any]) -> list[CaseResult]:
        """Results come back in the order of `items` regardless of worker count."""
        if self.workers == 1 or len(items) <= 1:
            return [self.run_one(case_id, item, func) for case_id, item in items]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(lambda pair: self.run_one(pair[0], pair[1], func), items))
