"""
Heir taxonomy: the canonical categories, their named groups and the variant
spellings that resolve to them. Loaded from rules/heirs.table.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional
import logging

from tools.arabic_text import clean, match_key

from .domain import Gender, HeirCategory, KinshipClass
from .errors import LabelResolutionError
from .table_files import DEFAULT_RULES_DIR, read_table

logger = logging.getLogger(__name__)

TAXONOMY_FILE = "heirs.table"
EXPECTED_CATEGORY_COUNT = 36

_YES = {"yes", "true", "1"}
_NO = {"no", "false", "0"}


@dataclass
class Taxonomy:
    """Ordered categories plus lookup tables. Order is blocking order."""

    categories: tuple[HeirCategory, ...]
    groups: dict[str, tuple[str, ...]]
    variants: dict[str, str]
    version: str = ""
    _by_label: dict[str, HeirCategory] = field(default_factory=dict, repr=False)
    _order: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_label = {c.canonical_label: c for c in self.categories}
        self._order = {c.canonical_label: i for i, c in enumerate(self.categories)}

    def __len__(self) -> int:
        return len(self.categories)

    def __contains__(self, label: str) -> bool:
        return self.try_resolve(label) is not None

    def try_resolve(self, raw: str) -> Optional[HeirCategory]:
        canonical = self.variants.get(match_key(raw))
        return self._by_label.get(canonical) if canonical else None

    def resolve(self, raw: str) -> HeirCategory:
        category = self.try_resolve(raw)
        if category is None:
            raise LabelResolutionError(raw)
        return category

    def get(self, canonical_label: str) -> HeirCategory:
        return self._by_label[canonical_label]

    def order_of(self, label: str) -> int:
        return self._order[self.resolve(label).canonical_label]

    def members(self, group: str) -> tuple[str, ...]:
        name = group.lstrip("@")
        if name not in self.groups:
            raise KeyError(f"Unknown heir group: @{name}")
        return self.groups[name]

    def expand(self, reference: str) -> tuple[str, ...]:
        """`@group` to its members, a label to its canonical form."""
        if reference.startswith("@"):
            return self.members(reference)
        return (self.resolve(reference).canonical_label,)

    def lookup_phrases(self) -> list[tuple[str, str]]:
        """(match key, canonical) pairs, longest key first, for greedy matching."""
        return sorted(self.variants.items(), key=lambda kv: (-len(kv[0]), kv[0]))

    def sort_labels(self, labels: Iterable[str]) -> list[str]:
        return sorted(labels, key=self.order_of)


def _parse_flag(table, row, text: str) -> bool:
    value = text.strip().lower()
    if value in _YES:
        return True
    if value in _NO:
        return False
    raise table.error(row, f"Expected yes/no, got {text!r}")


def _split_list(text: str) -> list[str]:
    return [clean(part) for part in text.split(",") if clean(part)]


def load_taxonomy(path: Path) -> Taxonomy:
    table = read_table(path, min_fields=4, max_fields=7)
    categories: list[HeirCategory] = []
    groups: dict[str, list[str]] = {}
    variants: dict[str, str] = {}

    for row in table.rows:
        fields = row.fields + [""] * (7 - len(row.fields))
        label, gender, kinship, residuary, group_text, variant_text, note = fields
        label = clean(label)
        if any(c.canonical_label == label for c in categories):
            raise table.error(row, f"Duplicate category {label!r}")
        try:
            category = HeirCategory(
                canonical_label=label,
                gender=Gender(gender.strip()),
                kinship_class=KinshipClass(kinship.strip()),
                residuary_capable=_parse_flag(table, row, residuary),
                note=note,
            )
        except ValueError as e:
            raise table.error(row, str(e)) from e
        categories.append(category)
        for group in _split_list(group_text):
            groups.setdefault(group, []).append(label)
        for spelling in [label] + _split_list(variant_text):
            key = match_key(spelling)
            owner = variants.get(key)
            if owner is not None and owner != label:
                raise table.error(row, f"Spelling {spelling!r} already belongs to {owner!r}")
            variants[key] = label

    # Derived groups used by the rule files.
    groups.setdefault("all", [c.canonical_label for c in categories])
    taxonomy = Taxonomy(
        categories=tuple(categories),
        groups={name: tuple(members) for name, members in groups.items()},
        variants=variants,
        version=table.version,
    )
    if len(taxonomy) != EXPECTED_CATEGORY_COUNT:
        logger.warning(
            "Taxonomy %s has %d categories, expected %d",
            path,
            len(taxonomy),
            EXPECTED_CATEGORY_COUNT,
        )
    logger.debug("Loaded taxonomy v%s: %d categories, %d spellings", taxonomy.version, len(taxonomy), len(variants))
    return taxonomy


@lru_cache(maxsize=None)
def _cached_taxonomy(path: Path) -> Taxonomy:
    return load_taxonomy(path)


def default_taxonomy(rules_dir: Optional[Path] = None) -> Taxonomy:
    return _cached_taxonomy(Path(rules_dir or DEFAULT_RULES_DIR) / TAXONOMY_FILE)
