"""
Blocking and share rule tables, loaded from rules/blocking.rules and
rules/shares.rules.

blocking.rules:  category | condition | note
shares.rules:    category | condition | share | note
Either file:     define name = condition

Share expressions:
    n/d                 fixed fraction
    residue             residuary, split by heads with the other residuaries
    n/d shared @group   collective fraction split equally over present members
    n/d after @group    fraction of what the group's fixed shares leave
    n/d plus residue    fixed fraction that becomes residue when something remains
    grandfather         best of head-count sharing, third of remainder, sixth
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Optional
import logging
import re

from tools.arabic_text import clean

from .conditions import Condition, compile_condition
from .domain import parse_fraction
from .errors import FractionError, RuleSyntaxError
from .table_files import DEFAULT_RULES_DIR, TableFile, read_table
from .taxonomy import TAXONOMY_FILE, Taxonomy, load_taxonomy

logger = logging.getLogger(__name__)

BLOCKING_FILE = "blocking.rules"
SHARES_FILE = "shares.rules"

SHARE_KINDS = ("fixed", "residue", "shared", "after", "plus_residue", "grandfather")

_DEFINE_RE = re.compile(r"^define\s+([A-Za-z_]\w*)\s*=\s*(.+)$")
_SHARED_RE = re.compile(r"^(\d+\s*/\s*\d+)\s+shared\s+(@\w+)$")
_AFTER_RE = re.compile(r"^(\d+\s*/\s*\d+)\s+after\s+(@\w+)$")
_PLUS_RE = re.compile(r"^(\d+\s*/\s*\d+)\s+plus\s+residue$")


@dataclass(frozen=True)
class ShareExpr:
    kind: str
    fraction: Optional[Fraction] = None
    group: tuple[str, ...] = ()
    group_name: str = ""

    def __str__(self) -> str:
        if self.kind == "fixed":
            return f"{self.fraction.numerator}/{self.fraction.denominator}"
        if self.kind in ("shared", "after"):
            return f"{self.fraction.numerator}/{self.fraction.denominator} {self.kind} {self.group_name}"
        if self.kind == "plus_residue":
            return f"{self.fraction.numerator}/{self.fraction.denominator} plus residue"
        return self.kind


@dataclass(frozen=True)
class BlockingRule:
    category: str
    condition: Condition
    note: str = ""
    line_no: int = 0

    @property
    def blockers(self) -> set[str]:
        """Categories whose presence can make this rule fire."""
        return self.condition.references(positive=True)


@dataclass(frozen=True)
class ShareRule:
    category: str
    condition: Condition
    share: ShareExpr
    note: str = ""
    line_no: int = 0

    def describe(self) -> str:
        return f"{self.category}: {self.share} when {self.condition}"


@dataclass
class RuleBook:
    """Taxonomy plus both rule tables; immutable once loaded."""

    taxonomy: Taxonomy
    blocking: dict[str, tuple[BlockingRule, ...]]
    shares: dict[str, tuple[ShareRule, ...]]
    versions: dict[str, str]

    def blocking_rules(self, category: str) -> tuple[BlockingRule, ...]:
        return self.blocking.get(category, ())

    def share_rules(self, category: str) -> tuple[ShareRule, ...]:
        return self.shares.get(category, ())

    def blocking_pairs(self) -> set[tuple[str, str]]:
        """(blocker, blocked) pairs implied by the blocking conditions."""
        return {(b, rule.category) for rules in self.blocking.values() for rule in rules for b in rule.blockers}


def parse_share_expr(text: str, taxonomy: Taxonomy) -> ShareExpr:
    text = " ".join(text.split())
    if text == "residue":
        return ShareExpr("residue")
    if text == "grandfather":
        return ShareExpr("grandfather")
    for kind, pattern in (("shared", _SHARED_RE), ("after", _AFTER_RE)):
        match = pattern.match(text)
        if match:
            group = match.group(2)
            return ShareExpr(kind, parse_fraction(match.group(1)), taxonomy.members(group), group)
    match = _PLUS_RE.match(text)
    if match:
        return ShareExpr("plus_residue", parse_fraction(match.group(1)))
    return ShareExpr("fixed", parse_fraction(text))


def _split_defines(table: TableFile, taxonomy: Taxonomy) -> tuple[dict[str, Condition], list]:
    """Compile `define` rows in file order; return them and the remaining rows."""
    defines: dict[str, Condition] = {}
    rows = []
    for row in table.rows:
        match = _DEFINE_RE.match(row.fields[0])
        if not match:
            rows.append(row)
            continue
        name, body = match.groups()
        if name in defines:
            raise table.error(row, f"Predicate {name!r} defined twice")
        try:
            defines[name] = compile_condition(body, taxonomy, defines)
        except RuleSyntaxError as e:
            raise table.error(row, str(e)) from e
    return defines, rows


def _category(table: TableFile, row, taxonomy: Taxonomy) -> str:
    label = clean(row.fields[0])
    category = taxonomy.try_resolve(label)
    if category is None or category.canonical_label != label:
        raise table.error(row, f"Not a canonical category: {label!r}")
    return label


def load_blocking_rules(path: Path, taxonomy: Taxonomy) -> tuple[dict[str, tuple[BlockingRule, ...]], str]:
    table = read_table(path, min_fields=1, max_fields=3)
    defines, rows = _split_defines(table, taxonomy)
    rules: dict[str, list[BlockingRule]] = {}
    for row in rows:
        if len(row.fields) < 2:
            raise table.error(row, "Blocking rule needs a category and a condition")
        category = _category(table, row, taxonomy)
        try:
            condition = compile_condition(row.fields[1], taxonomy, defines)
        except RuleSyntaxError as e:
            raise table.error(row, str(e)) from e
        rule = BlockingRule(category, condition, row.fields[2] if len(row.fields) > 2 else "", row.line_no)
        own_order = taxonomy.order_of(category)
        for blocker in rule.condition.references(True) | rule.condition.references(False):
            if blocker == category:
                raise table.error(row, f"{category} cannot block itself")
            if taxonomy.order_of(blocker) > own_order:
                raise table.error(row, f"{blocker} is decided after {category} and cannot be tested here")
        rules.setdefault(category, []).append(rule)
    return {k: tuple(v) for k, v in rules.items()}, table.version


def load_share_rules(path: Path, taxonomy: Taxonomy) -> tuple[dict[str, tuple[ShareRule, ...]], str]:
    table = read_table(path, min_fields=1, max_fields=4)
    defines, rows = _split_defines(table, taxonomy)
    rules: dict[str, list[ShareRule]] = {}
    for row in rows:
        if len(row.fields) < 3:
            raise table.error(row, "Share rule needs a category, a condition and a share")
        category = _category(table, row, taxonomy)
        try:
            condition = compile_condition(row.fields[1], taxonomy, defines)
            share = parse_share_expr(row.fields[2], taxonomy)
        except (RuleSyntaxError, FractionError, KeyError) as e:
            raise table.error(row, str(e)) from e
        note = row.fields[3] if len(row.fields) > 3 else ""
        rules.setdefault(category, []).append(ShareRule(category, condition, share, note, row.line_no))

    missing = [c.canonical_label for c in taxonomy.categories if c.canonical_label not in rules]
    if missing:
        raise RuleSyntaxError(f"No share rule for: {', '.join(missing)}", path=table.path)
    return {k: tuple(v) for k, v in rules.items()}, table.version


def load_rulebook(rules_dir: Optional[Path] = None) -> RuleBook:
    """Load taxonomy and rule tables from a rules directory."""
    rules_dir = Path(rules_dir or DEFAULT_RULES_DIR)
    taxonomy = load_taxonomy(rules_dir / TAXONOMY_FILE)
    blocking, blocking_version = load_blocking_rules(rules_dir / BLOCKING_FILE, taxonomy)
    shares, shares_version = load_share_rules(rules_dir / SHARES_FILE, taxonomy)
    logger.debug(
        "Loaded rules from %s (blocking v%s, shares v%s)",
        rules_dir,
        blocking_version,
        shares_version,
    )
    return RuleBook(
        taxonomy=taxonomy,
        blocking=blocking,
        shares=shares,
        versions={"heirs": taxonomy.version, "blocking": blocking_version, "shares": shares_version},
    )


@lru_cache(maxsize=None)
def _cached_rulebook(rules_dir: Path) -> RuleBook:
    return load_rulebook(rules_dir)


def default_rulebook(rules_dir: Optional[Path] = None) -> RuleBook:
    return _cached_rulebook(Path(rules_dir or DEFAULT_RULES_DIR).resolve())
