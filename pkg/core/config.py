"""
Run settings: built-in defaults, then MAWARITH_* environment variables, then
command-line flags.
"""

from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Mapping, MutableMapping, Optional
import logging
import os

from tools.dataset_io import DEFAULT_FIELDS, parse_field_map

from .mire import DEFAULT_TOLERANCE, DEFAULT_WEIGHTS, MireWeights
from .solver import SolverConfig

logger = logging.getLogger(__name__)

ENV_WEIGHTS = "MAWARITH_WEIGHTS"
ENV_TOLERANCE = "MAWARITH_TOLERANCE"
ENV_SPOUSE_RADD = "MAWARITH_SPOUSE_RADD"
ENV_FIELD_MAP = "MAWARITH_FIELD_MAP"
_KNOWN_SETTINGS = (ENV_WEIGHTS, ENV_TOLERANCE, ENV_SPOUSE_RADD, ENV_FIELD_MAP)

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def _env_assignment(line: str) -> Optional[tuple[str, str]]:
    """NAME=value from one .env line, in the shell syntax load_env.sh sources."""
    line = line.strip()
    if line.startswith("export "):
        line = line[len("export "):].lstrip()
    if not line or line.startswith("#") or "=" not in line:
        return None
    name, value = (part.strip() for part in line.split("=", 1))
    if value[:1] in ("'", '"') and value.endswith(value[0]) and len(value) > 1:
        value = value[1:-1]
    else:
        value = value.split(" #", 1)[0].rstrip()
    return (name, value) if name else None


def load_env_file(env_path: Path, environ: Optional[MutableMapping[str, str]] = None) -> list[str]:
    """
    Read MAWARITH_* defaults from a repo-local .env file.

    The file uses the same syntax that scripts/load_env.sh sources: optional
    ``export``, quoted values and trailing comments. A variable that is
    already set in the environment is never replaced, so an exported value
    or a one-off ``MAWARITH_TOLERANCE=0.1 python run_mawarith.py ...`` wins.

    :return: Names that were set from the file.
    """
    environ = os.environ if environ is None else environ
    if not env_path.is_file():
        return []
    loaded = []
    for line in env_path.read_text(encoding="utf-8").splitlines():
        assignment = _env_assignment(line)
        if assignment is None:
            continue
        name, value = assignment
        if name.startswith("MAWARITH_") and name not in _KNOWN_SETTINGS:
            logger.warning("%s: %s is not a Mawarith setting", env_path, name)
        if name in environ:
            continue
        environ[name] = value
        loaded.append(name)
    logger.debug("loaded %s from %s", ", ".join(loaded) or "nothing", env_path)
    return loaded


def parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ValueError(f"Invalid boolean: {text!r}")


def parse_tolerance(text: str) -> Decimal:
    """Tolerance in percentage points, e.g. "0.05"."""
    try:
        value = Decimal(text.strip())
    except InvalidOperation as e:
        raise ValueError(f"Invalid tolerance: {text!r}") from e
    if value < 0 or not value.is_finite():
        raise ValueError(f"Tolerance must be a non-negative number, got {text!r}")
    return value


@dataclass(frozen=True)
class Settings:
    weights: MireWeights = DEFAULT_WEIGHTS
    tolerance: Decimal = DEFAULT_TOLERANCE
    spouse_radd: bool = False
    field_map: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_FIELDS))
    rules_dir: Optional[Path] = None
    workers: int = 1

    @property
    def solver_config(self) -> SolverConfig:
        return SolverConfig(spouse_radd=self.spouse_radd)

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        """
        :raises ValueError: a MAWARITH_* variable is malformed.
        """
        env = os.environ if environ is None else environ
        settings = cls()
        if env.get(ENV_WEIGHTS):
            settings = replace(settings, weights=MireWeights.parse(env[ENV_WEIGHTS]))
        if env.get(ENV_TOLERANCE):
            settings = replace(settings, tolerance=parse_tolerance(env[ENV_TOLERANCE]))
        if env.get(ENV_SPOUSE_RADD):
            settings = replace(settings, spouse_radd=parse_bool(env[ENV_SPOUSE_RADD]))
        if env.get(ENV_FIELD_MAP):
            settings = replace(settings, field_map=parse_field_map(env[ENV_FIELD_MAP]))
        return settings

    def with_flags(
        self,
        weights: Optional[str] = None,
        tolerance: Optional[str] = None,
        spouse_radd: Optional[bool] = None,
        field_map: Optional[str] = None,
        rules_dir: Optional[Path] = None,
        workers: Optional[int] = None,
    ) -> "Settings":
        """Apply command-line values; None leaves the current value."""
        changes: dict = {}
        if weights is not None:
            changes["weights"] = MireWeights.parse(weights)
        if tolerance is not None:
            changes["tolerance"] = parse_tolerance(tolerance)
        if spouse_radd is not None:
            changes["spouse_radd"] = spouse_radd
        if field_map is not None:
            changes["field_map"] = parse_field_map(field_map)
        if rules_dir is not None:
            changes["rules_dir"] = Path(rules_dir)
        if workers is not None:
            if workers < 1:
                raise ValueError(f"--workers must be at least 1, got {workers}")
            changes["workers"] = workers
        return replace(self, **changes)
