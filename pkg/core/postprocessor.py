"""
Rule-based repair of model-generated solution records.

Variants:
    original    extract only
    basic       extract, normalize typography, dedupe blocked, fix the adjustment label
    post_tasil  basic, then recalculate post_tasil when it merely copies the shares

Share fractions are never rewritten and valid adjustment labels are always
kept, even when the share sum disagrees with them.
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Union
import logging

from tools.arabic_text import clean, fix_spelling, match_key
from tools.json_extract import extract_json

from .domain import (
    AdjustmentType,
    DistributionEntry,
    RelativeMention,
    ShareEntry,
    ShareValue,
    SolutionRecord,
)
from .errors import ContractViolation, ExtractionError, FractionError
from .solver import SolverConfig, compute_tasil, detect_adjustment

logger = logging.getLogger(__name__)

VALID_VARIANTS = ("original", "basic", "post_tasil")

_VARIANT_ALIASES = {"posttasil": "post_tasil", "post-tasil": "post_tasil"}

RawOutput = Union[str, dict, SolutionRecord]


def normalize_variant(variant: str) -> str:
    """Canonical variant name; raises ValueError for anything else."""
    name = _VARIANT_ALIASES.get(variant.strip().lower(), variant.strip().lower())
    if name not in VALID_VARIANTS:
        raise ValueError(f"Invalid variant: {variant}. Must be one of {VALID_VARIANTS}")
    return name


@dataclass
class RepairResult:
    """Repaired record plus the stages that changed it."""

    record: SolutionRecord
    variant: str
    stages: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_log(self, case_id: str = "") -> dict:
        return {"id": case_id, "variant": self.variant, "stages": self.stages, "warnings": self.warnings}


def extract_record(raw: RawOutput) -> SolutionRecord:
    """
    Recover the five-field record from raw output.

    :raises ExtractionError: no JSON object could be decoded.
    :raises SchemaError: the object lacks required keys.
    """
    if isinstance(raw, SolutionRecord):
        return raw
    data = raw if isinstance(raw, dict) else extract_json(raw or "")
    if data is None:
        raise ExtractionError("No JSON object found in model output")
    return SolutionRecord.from_json(data)


def _clean_mention(mention: RelativeMention) -> RelativeMention:
    return replace(mention, label=clean(mention.label))


def _clean_share(entry: ShareEntry) -> ShareEntry:
    raw = fix_spelling(clean(entry.raw))
    if raw == entry.raw and entry.label == clean(entry.label):
        return entry
    try:
        value = ShareValue.parse(raw)
    except (FractionError, ContractViolation):
        value = None
    return ShareEntry(clean(entry.label), entry.count, value, raw)


def _clean_distribution(entry: DistributionEntry) -> DistributionEntry:
    return replace(entry, label=clean(entry.label))


def normalize_typography(record: SolutionRecord) -> SolutionRecord:
    """Strip tatweel from labels and share text; fix the باقى spelling."""
    return record.with_changes(
        heirs=tuple(_clean_mention(m) for m in record.heirs),
        blocked=tuple(_clean_mention(m) for m in record.blocked),
        shares=tuple(_clean_share(s) for s in record.shares),
        awl_or_radd=clean(record.awl_or_radd),
        post_tasil=replace(
            record.post_tasil,
            distribution=tuple(_clean_distribution(d) for d in record.post_tasil.distribution),
        ),
    )


def _merge_duplicates(mentions: tuple[RelativeMention, ...], where: str) -> tuple[RelativeMention, ...]:
    merged: dict[str, RelativeMention] = {}
    for mention in mentions:
        key = match_key(mention.label)
        if key in merged:
            first = merged[key]
            logger.debug("merged duplicate %s entry %s", where, mention.label)
            merged[key] = RelativeMention(first.label, first.count + mention.count)
        else:
            merged[key] = mention
    return tuple(merged.values())


def dedupe_blocked(record: SolutionRecord) -> SolutionRecord:
    """Drop blocked entries that also appear among the heirs; the heirs list wins."""
    heirs = _merge_duplicates(record.heirs, "heirs")
    heir_keys = {match_key(m.label) for m in heirs}
    blocked = tuple(m for m in _merge_duplicates(record.blocked, "blocked") if match_key(m.label) not in heir_keys)
    dropped = len(record.blocked) - len(blocked)
    if dropped:
        logger.debug("dedupe_blocked removed %d blocked entries", dropped)
    return record.with_changes(heirs=heirs, blocked=blocked)


def normalize_adjustment_label(
    record: SolutionRecord,
    warnings: Optional[list[str]] = None,
) -> SolutionRecord:
    """Keep a valid label; otherwise infer it from the record's own shares."""
    label = AdjustmentType.parse(record.awl_or_radd)
    if label is not None:
        return record.with_changes(awl_or_radd=label.value)
    try:
        if not record.shares:
            raise ContractViolation("no shares to infer from")
        inferred = detect_adjustment(record.shares)
    except ContractViolation as e:
        message = f"awl_or_radd {record.awl_or_radd!r} unrecognised and shares unusable ({e}); set to لا"
        logger.warning(message)
        if warnings is not None:
            warnings.append(message)
        inferred = AdjustmentType.NONE
    return record.with_changes(awl_or_radd=inferred.value)


def copies_shares(record: SolutionRecord) -> bool:
    """
    True when post_tasil restates the unadjusted shares: every share has a
    distribution entry whose fraction equals it, either per category or as
    written per individual.
    """
    if not record.shares or len(record.post_tasil.distribution) != len(record.shares):
        return False
    for share in record.shares:
        if share.value is None or share.value.residue:
            return False
        entry = record.post_tasil.entry(share.label)
        if entry is None or entry.fraction is None:
            return False
        if share.value.fraction not in (entry.fraction, entry.collective):
            return False
    return True


def recalc_post_tasil(record: SolutionRecord, config: Optional[SolverConfig] = None) -> SolutionRecord:
    """Recompute post_tasil for an 'awl or radd record whose post_tasil copies its shares."""
    if record.adjustment not in (AdjustmentType.AWL, AdjustmentType.RADD):
        return record
    if not copies_shares(record):
        return record
    try:
        post_tasil = compute_tasil(record.shares, record.adjustment, config)
    except ContractViolation as e:
        logger.debug("recalc_post_tasil skipped: %s", e)
        return record
    return record.with_changes(post_tasil=post_tasil)


def repair(raw: RawOutput, variant: str = "basic", config: Optional[SolverConfig] = None) -> RepairResult:
    variant = normalize_variant(variant)
    record = extract_record(raw)
    result = RepairResult(record=record, variant=variant)
    if variant == "original":
        return result

    stages = [
        ("normalize_typography", normalize_typography),
        ("dedupe_blocked", dedupe_blocked),
        ("normalize_adjustment_label", lambda r: normalize_adjustment_label(r, result.warnings)),
    ]
    if variant == "post_tasil":
        stages.append(("recalc_post_tasil", lambda r: recalc_post_tasil(r, config)))
    for name, stage in stages:
        repaired = stage(result.record)
        if repaired != result.record:
            result.stages.append(name)
            result.record = repaired
    return result


def run_pipeline(raw: RawOutput, variant: str = "basic", config: Optional[SolverConfig] = None) -> SolutionRecord:
    return repair(raw, variant, config).record

