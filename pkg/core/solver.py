"""
Rule-table solver: blocking, share assignment, adjustment detection and the
final normalized distribution, composed by solve_case.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Iterator, Optional
import logging

from .case_parser import CaseScenario
from .domain import (
    RESIDUE,
    AdjustmentType,
    DistributionEntry,
    KinshipClass,
    PostTasil,
    RelativeMention,
    ShareEntry,
    ShareValue,
    SolutionRecord,
    format_percentage,
    to_percentage,
)
from .errors import ContractViolation, RuleCoverageError
from .rule_tables import RuleBook, ShareRule, default_rulebook
from .taxonomy import Taxonomy, default_taxonomy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """
    :param spouse_radd: Let spouses take part in radd. The majority view
        excludes them; the default follows it.
    """

    spouse_radd: bool = False


class _Counts:
    def __init__(self, present: dict[str, int], mentioned: dict[str, int]):
        self._present = present
        self._mentioned = mentioned

    def present(self, label: str) -> int:
        return self._present.get(label, 0)

    def mentioned(self, label: str) -> int:
        return self._mentioned.get(label, 0)


@dataclass
class BlockingOutcome:
    heirs: list[RelativeMention]
    blocked: list[RelativeMention]
    trace: list[str] = field(default_factory=list)

    def __iter__(self) -> Iterator[list[RelativeMention]]:
        return iter((self.heirs, self.blocked))


@dataclass
class Solution:
    """A solved case together with the rule trace that produced it."""

    record: SolutionRecord
    trace: list[str]

    def summary(self) -> str:
        return "\n".join(self.trace)


def _canonical_mentions(mentions: Iterable[RelativeMention], taxonomy: Taxonomy) -> dict[str, int]:
    merged: dict[str, int] = {}
    for mention in mentions:
        label = taxonomy.resolve(mention.label).canonical_label
        merged[label] = merged.get(label, 0) + mention.count
    return merged


def determine_blocking(scenario: CaseScenario, rulebook: Optional[RuleBook] = None) -> BlockingOutcome:
    """Split the mentions into effective heirs and blocked relatives."""
    rulebook = rulebook or default_rulebook()
    taxonomy = rulebook.taxonomy
    mentioned = _canonical_mentions(scenario.mentions, taxonomy)
    present: dict[str, int] = {}
    counts = _Counts(present, mentioned)
    blocked_labels: set[str] = set()
    trace: list[str] = []

    for category in taxonomy.categories:
        label = category.canonical_label
        if label not in mentioned:
            continue
        fired = next((r for r in rulebook.blocking_rules(label) if r.condition.evaluate(counts)), None)
        if fired is None:
            present[label] = mentioned[label]
        else:
            blocked_labels.add(label)
            trace.append(f"blocked {label}: {fired.condition} [blocking.rules:{fired.line_no}]")

    heirs = [RelativeMention(label, n) for label, n in mentioned.items() if label not in blocked_labels]
    blocked = [RelativeMention(label, n) for label, n in mentioned.items() if label in blocked_labels]
    return BlockingOutcome(heirs, blocked, trace)


def _grandfather_options(
    heirs: list[RelativeMention],
    fixed_total: Fraction,
    taxonomy: Taxonomy,
) -> list[tuple[str, Fraction]]:
    grandfathers = set(taxonomy.members("grandfather"))
    siblings = set(taxonomy.members("agnatic_sibling"))
    if not any(m.label in grandfathers for m in heirs):
        raise ContractViolation("grandfather_share needs a grandfather among the heirs")
    sibling_heads = sum(m.count * taxonomy.get(m.label).heads for m in heirs if m.label in siblings)
    if sibling_heads == 0:
        raise ContractViolation("grandfather_share needs full or paternal siblings among the heirs")
    remainder = 1 - fixed_total
    # Tie order: the fixed sixth first.
    return [
        ("sixth", Fraction(1, 6)),
        ("third of remainder", remainder / 3),
        ("head-count sharing", remainder * 2 / (2 + sibling_heads)),
    ]


def grandfather_share(
    heirs: list[RelativeMention],
    fixed_total: Fraction,
    taxonomy: Optional[Taxonomy] = None,
) -> ShareValue:
    """
    Grandfather's share next to full or paternal siblings: the best of
    head-count sharing (he counts as a brother), a third of what the fixed
    shares leave, and a sixth of the estate.

    :param heirs: Effective heirs, the grandfather and his siblings included.
    :param fixed_total: Sum of every other heir's fixed share.
    """
    options = _grandfather_options(heirs, fixed_total, taxonomy or default_taxonomy())
    best_name, best = options[0]
    for name, value in options[1:]:
        if value > best:
            best_name, best = name, value
    logger.debug("grandfather options %s -> %s", options, best_name)
    return ShareValue(fraction=best)


def assign_shares(
    heirs: list[RelativeMention],
    mentioned: Optional[list[RelativeMention]] = None,
    rulebook: Optional[RuleBook] = None,
    trace: Optional[list[str]] = None,
) -> list[ShareEntry]:
    """
    Give every effective heir exactly one share.

    :param heirs: Post-blocking heirs.
    :param mentioned: Every relative in the question; defaults to `heirs`.
        Only the mother's rule looks at it (excluded siblings still reduce her).
    """
    rulebook = rulebook or default_rulebook()
    taxonomy = rulebook.taxonomy
    present = _canonical_mentions(heirs, taxonomy)
    counts = _Counts(present, _canonical_mentions(mentioned, taxonomy) if mentioned else present)
    trace = trace if trace is not None else []

    chosen: dict[str, ShareRule] = {}
    for label in present:
        fired = [r for r in rulebook.share_rules(label) if r.condition.evaluate(counts)]
        if len(fired) != 1:
            lines = ", ".join(str(r.line_no) for r in fired) or "none"
            raise RuleCoverageError(
                f"{len(fired)} share rules fired for {label} (lines: {lines})",
                category=label,
            )
        chosen[label] = fired[0]
        trace.append(f"share {label}: {fired[0].share} when {fired[0].condition} [shares.rules:{fired[0].line_no}]")

    values: dict[str, Fraction] = {}
    for label, rule in chosen.items():
        expr = rule.share
        if expr.kind in ("fixed", "plus_residue"):
            values[label] = expr.fraction
        elif expr.kind == "shared":
            members = sum(present.get(member, 0) for member in expr.group)
            values[label] = expr.fraction * present[label] / members
    for label, rule in chosen.items():
        expr = rule.share
        if expr.kind == "after":
            base = 1 - sum(values.get(member, Fraction(0)) for member in expr.group)
            values[label] = expr.fraction * base
    for label, rule in chosen.items():
        if rule.share.kind == "grandfather":
            others = sum(values.values(), Fraction(0))
            mentions = [RelativeMention(lbl, n) for lbl, n in present.items()]
            values[label] = grandfather_share(mentions, others, taxonomy).fraction
            trace.append(f"grandfather {label}: {values[label]} next to fixed total {others}")

    residuaries = [label for label, rule in chosen.items() if rule.share.kind == "residue"]
    fixed_total = sum(values.values(), Fraction(0))
    entries = []
    for label, count in present.items():
        kind = chosen[label].share.kind
        mention = RelativeMention(label, count)
        if kind == "residue":
            entries.append(ShareEntry.of(mention, RESIDUE))
        elif kind == "plus_residue" and fixed_total < 1 and not residuaries:
            trace.append(f"{label} takes the remainder on top of {values[label]}")
            entries.append(ShareEntry.of(mention, RESIDUE))
        else:
            entries.append(ShareEntry.of(mention, ShareValue(fraction=values[label])))
    return entries


def _fixed_fractions(shares: Iterable[ShareEntry]) -> list[Fraction]:
    fractions = []
    for entry in shares:
        if entry.value is None:
            raise ContractViolation(f"Unparseable share for {entry.label}: {entry.raw!r}")
        if not entry.value.residue:
            fractions.append(entry.value.fraction)
    return fractions


def detect_adjustment(shares: Iterable[ShareEntry]) -> AdjustmentType:
    """عول when fixed shares exceed the estate, رد when they fall short with no residuary, else لا."""
    shares = list(shares)
    if any(e.value is not None and e.value.residue for e in shares):
        _fixed_fractions(shares)
        return AdjustmentType.NONE
    total = sum(_fixed_fractions(shares), Fraction(0))
    if total > 1:
        return AdjustmentType.AWL
    if total < 1:
        return AdjustmentType.RADD
    return AdjustmentType.NONE


def _heads(label: str, taxonomy: Taxonomy) -> int:
    category = taxonomy.try_resolve(label)
    return category.heads if category else 1


def _is_spouse(label: str, taxonomy: Taxonomy) -> bool:
    category = taxonomy.try_resolve(label)
    return category is not None and category.kinship_class is KinshipClass.SPOUSE


def compute_tasil(
    shares: Iterable[ShareEntry],
    adjustment: AdjustmentType,
    config: Optional[SolverConfig] = None,
    taxonomy: Optional[Taxonomy] = None,
) -> PostTasil:
    """
    Final distribution over the smallest common base in which every
    individual holds a whole number of parts ('awl, radd and tashih applied).
    """
    shares = list(shares)
    config = config or SolverConfig()
    taxonomy = taxonomy or default_taxonomy()
    if not shares:
        raise ContractViolation("compute_tasil needs at least one share")
    has_residue = any(e.value is not None and e.value.residue for e in shares)
    if adjustment is AdjustmentType.RADD and has_residue:
        raise ContractViolation("radd requested while a residuary is present")
    expected = detect_adjustment(shares)
    if adjustment is not expected:
        raise ContractViolation(f"Adjustment {adjustment.value} does not match the shares ({expected.value})")

    fixed = {i: e.value.fraction for i, e in enumerate(shares) if not e.value.residue}
    collective: dict[int, Fraction] = {}

    if adjustment is AdjustmentType.AWL:
        total = sum(fixed.values())
        collective = {i: f / total for i, f in fixed.items()}
    elif adjustment is AdjustmentType.RADD:
        spouses = set() if config.spouse_radd else {i for i in fixed if _is_spouse(shares[i].label, taxonomy)}
        others = [i for i in fixed if i not in spouses]
        if spouses and others:
            kept = sum(fixed[i] for i in spouses)
            pool = sum(fixed[i] for i in others)
            collective = {i: fixed[i] for i in spouses}
            collective.update({i: fixed[i] / pool * (1 - kept) for i in others})
        else:
            total = sum(fixed.values())
            collective = {i: f / total for i, f in fixed.items()}
    else:
        collective = dict(fixed)
        remainder = 1 - sum(fixed.values(), Fraction(0))
        residue = [i for i, e in enumerate(shares) if e.value.residue]
        if residue:
            if remainder <= 0:
                raise ContractViolation("Nothing remains for the residuaries")
            units = sum(shares[i].count * _heads(shares[i].label, taxonomy) for i in residue)
            for i in residue:
                collective[i] = remainder * shares[i].count * _heads(shares[i].label, taxonomy) / units

    per_individual = {i: collective[i] / shares[i].count for i in collective}
    total_shares = lcm(*(f.denominator for f in per_individual.values()))
    distribution = []
    for i, entry in enumerate(shares):
        fraction = per_individual[i]
        percentage = to_percentage(fraction)
        distribution.append(
            DistributionEntry(
                label=entry.label,
                count=entry.count,
                fraction=fraction,
                percentage=percentage,
                raw_fraction=f"{fraction * total_shares}/{total_shares}",
                raw_percentage=format_percentage(percentage),
            )
        )
    return PostTasil(total_shares=total_shares, distribution=tuple(distribution))


class FiqhSolver:
    """Runs the full chain for one case with a fixed rule book and config."""

    def __init__(self, rulebook: Optional[RuleBook] = None, config: Optional[SolverConfig] = None):
        """
        :param rulebook: Loaded rule tables; defaults to the bundled rules/.
        :param config: Policy switches; defaults to SolverConfig().
        """
        self.rulebook = rulebook or default_rulebook()
        self.config = config or SolverConfig()

    def solve(self, scenario: CaseScenario) -> Solution:
        outcome = determine_blocking(scenario, self.rulebook)
        trace = list(outcome.trace)
        heirs, blocked = list(outcome.heirs), list(outcome.blocked)

        while True:
            entries = assign_shares(heirs, list(scenario.mentions), self.rulebook, trace)
            residuaries = [e for e in entries if e.value.residue]
            fixed_total = sum((e.value.fraction for e in entries if not e.value.residue), Fraction(0))
            if not residuaries or fixed_total < 1:
                break
            # Fixed shares took everything: residuaries inherit nothing.
            exhausted = {e.label for e in residuaries}
            trace.append(f"exhausted residuaries: {', '.join(sorted(exhausted))}")
            blocked.extend(m for m in heirs if m.label in exhausted)
            heirs = [m for m in heirs if m.label not in exhausted]

        adjustment = detect_adjustment(entries)
        trace.append(f"adjustment: {adjustment.value}")
        post_tasil = compute_tasil(entries, adjustment, self.config, self.rulebook.taxonomy)
        trace.append(f"total shares: {post_tasil.total_shares}")
        record = SolutionRecord(
            heirs=tuple(heirs),
            blocked=tuple(blocked),
            shares=tuple(entries),
            awl_or_radd=adjustment.value,
            post_tasil=post_tasil,
        )
        return Solution(record=record, trace=trace)


def solve_case(
    scenario: CaseScenario,
    rulebook: Optional[RuleBook] = None,
    config: Optional[SolverConfig] = None,
) -> SolutionRecord:
    """determine_blocking -> assign_shares -> detect_adjustment -> compute_tasil."""
    return FiqhSolver(rulebook, config).solve(scenario).record
