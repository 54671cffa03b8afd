"""
Reader for the line-oriented rule and taxonomy files under rules/.

A file starts with a `# version: N` header. Other `#` lines and blank lines
are comments. Data lines hold fields separated by ` | `; the last field is a
free-text provenance note and may be empty.
"""

from dataclasses import dataclass, field
from pathlib import Path
import re

from .errors import RuleSyntaxError

REPO_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_RULES_DIR = REPO_ROOT / "rules"

FIELD_SEPARATOR = " | "
_VERSION_RE = re.compile(r"^#\s*version:\s*(\S+)\s*$")


@dataclass
class TableRow:
    line_no: int
    fields: list[str]


@dataclass
class TableFile:
    path: Path
    version: str
    rows: list[TableRow] = field(default_factory=list)

    def error(self, row: TableRow, message: str) -> RuleSyntaxError:
        return RuleSyntaxError(message, path=self.path, line_no=row.line_no)


def _read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def read_table(path: Path, min_fields: int, max_fields: int) -> TableFile:
    """
    Parse one table file.

    :param path: File to read.
    :param min_fields: Fewest fields a data line may have.
    :param max_fields: Most fields; extra separators belong to the note.
    """
    path = Path(path)
    lines = _read(path).splitlines()
    version = ""
    if lines:
        match = _VERSION_RE.match(lines[0].strip())
        if match:
            version = match.group(1)
    if not version:
        raise RuleSyntaxError("Missing '# version:' header", path=path, line_no=1)

    table = TableFile(path=path, version=version)
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = [p.strip() for p in stripped.split(FIELD_SEPARATOR.strip())]
        if len(parts) > max_fields:
            parts = parts[: max_fields - 1] + [" | ".join(parts[max_fields - 1:])]
        if len(parts) < min_fields:
            raise RuleSyntaxError(
                f"Expected at least {min_fields} fields, got {len(parts)}",
                path=path,
                line_no=line_no,
            )
        table.rows.append(TableRow(line_no=line_no, fields=parts))
    return table
