from fractions import Fraction

import pytest

from core.case_parser import CaseScenario, parse_case
from core.domain import RESIDUE, AdjustmentType, RelativeMention, ShareEntry, ShareValue, SolutionRecord
from core.errors import ContractViolation
from core.solver import (
    FiqhSolver,
    SolverConfig,
    assign_shares,
    compute_tasil,
    detect_adjustment,
    determine_blocking,
    grandfather_share,
    solve_case,
)
from tests.worked_cases import WORKED_CASES


def _scenario(*pairs):
    return CaseScenario(mentions=tuple(RelativeMention(label, n) for label, n in pairs))


def _share(label, count, value):
    return ShareEntry.of(RelativeMention(label, count), value)


@pytest.mark.parametrize("name", sorted(WORKED_CASES))
def test_worked_cases(name):
    question, gold = WORKED_CASES[name]
    record = solve_case(parse_case(question))
    assert record == SolutionRecord.from_json(gold)
    assert record.to_json() == gold


def test_table2_percentages():
    record = solve_case(parse_case(WORKED_CASES["table2"][0]))
    assert record.adjustment is AdjustmentType.AWL
    assert record.post_tasil.total_shares == 27
    wife = record.post_tasil.entry("زوجة")
    assert wife.raw_fraction == "3/27" and wife.raw_percentage == "11.11%"
    assert record.post_tasil.allocation_sum() == 1


def test_case3_radd_sums_to_one():
    record = solve_case(parse_case(WORKED_CASES["case3"][0]))
    assert record.adjustment is AdjustmentType.RADD
    assert record.post_tasil.allocation_sum() == 1


def test_blocking_partitions_mentions():
    scenario = parse_case(WORKED_CASES["case4"][0])
    heirs, blocked = determine_blocking(scenario)
    assert {m.label for m in heirs} == {"أب الأب", "أخ لأب", "أم"}
    assert len(blocked) == 7
    assert sorted(m.label for m in heirs + blocked) == sorted(scenario.labels())


def test_blocking_trace_names_rule():
    outcome = determine_blocking(_scenario(("أب", 1), ("أخ شقيق", 1)))
    assert [m.label for m in outcome.blocked] == ["أخ شقيق"]
    assert "blocking.rules" in outcome.trace[0]


def test_son_excludes_lower_descendants():
    heirs, blocked = determine_blocking(_scenario(("ابن", 1), ("ابن ابن", 1), ("بنت ابن", 1)))
    assert [m.label for m in heirs] == ["ابن"]
    assert {m.label for m in blocked} == {"ابن ابن", "بنت ابن"}


def test_two_daughters_exclude_sons_daughter():
    heirs, blocked = determine_blocking(_scenario(("بنت", 2), ("بنت ابن", 1)))
    assert [m.label for m in blocked] == ["بنت ابن"]


def test_grandfather_options():
    heirs = [RelativeMention("أب الأب"), RelativeMention("أخ لأب", 4)]
    assert grandfather_share(heirs, Fraction(1, 6)).fraction == Fraction(5, 18)
    # one brother: head-count sharing gives half of the remainder
    heirs = [RelativeMention("أب الأب"), RelativeMention("أخ شقيق")]
    assert grandfather_share(heirs, Fraction(0)).fraction == Fraction(1, 2)
    # fixed shares leave little: the sixth wins
    heirs = [RelativeMention("أب الأب"), RelativeMention("أخ شقيق", 2)]
    assert grandfather_share(heirs, Fraction(2, 3)).fraction == Fraction(1, 6)


def test_grandfather_share_needs_siblings():
    with pytest.raises(ContractViolation):
        grandfather_share([RelativeMention("أب الأب")], Fraction(0))


def test_mother_third_after_spouse():
    entries = assign_shares([RelativeMention("زوج"), RelativeMention("أم"), RelativeMention("أب")])
    values = {e.label: e.value for e in entries}
    assert values["زوج"].fraction == Fraction(1, 2)
    assert values["أم"].fraction == Fraction(1, 6)
    assert values["أب"] is RESIDUE


def test_mother_reduced_by_excluded_siblings():
    record = solve_case(_scenario(("أم", 1), ("أب", 1), ("أخ شقيق", 2)))
    assert record.share_for("أم").value.fraction == Fraction(1, 6)
    assert [m.label for m in record.blocked] == ["أخ شقيق"]


def test_grandmothers_share_the_sixth():
    record = solve_case(_scenario(("أم الأم", 1), ("أم الأب", 1), ("ابن", 1)))
    assert record.share_for("أم الأم").value.fraction == Fraction(1, 12)
    assert record.share_for("أم الأب").value.fraction == Fraction(1, 12)


def test_uterine_siblings_split_equally():
    record = solve_case(_scenario(("أخ لأم", 1), ("أخت لأم", 1), ("عم شقيق", 1)))
    assert record.post_tasil.entry("أخ لأم").fraction == Fraction(1, 6)
    assert record.post_tasil.entry("أخت لأم").fraction == Fraction(1, 6)
    assert record.post_tasil.entry("عم شقيق").fraction == Fraction(2, 3)


def test_father_with_daughter_takes_sixth_and_remainder():
    record = solve_case(_scenario(("بنت", 1), ("أب", 1)))
    assert record.share_for("أب").value is RESIDUE
    assert record.post_tasil.entry("أب").fraction == Fraction(1, 2)
    assert record.adjustment is AdjustmentType.NONE


def test_sons_take_twice_daughters():
    record = solve_case(_scenario(("ابن", 1), ("بنت", 2)))
    assert record.post_tasil.entry("ابن").fraction == Fraction(1, 2)
    assert record.post_tasil.entry("بنت").fraction == Fraction(1, 4)
    assert record.post_tasil.total_shares == 4


def test_exhausted_residuary_is_blocked():
    # husband 1/4 + mother 1/6 + two daughters 2/3 exceed the estate; the sister gets nothing
    solution = FiqhSolver().solve(_scenario(("زوج", 1), ("أم", 1), ("بنت", 2), ("أخت شقيقة", 1)))
    record = solution.record
    assert [m.label for m in record.blocked] == ["أخت شقيقة"]
    assert record.adjustment is AdjustmentType.AWL
    assert record.post_tasil.total_shares == 13
    assert any("exhausted" in line for line in solution.trace)


def test_wife_alone_takes_everything_by_radd():
    record = solve_case(_scenario(("زوجة", 1)))
    assert record.adjustment is AdjustmentType.RADD
    assert record.post_tasil.entry("زوجة").fraction == 1


def test_spouse_radd_policy():
    shares = [_share("زوجة", 1, ShareValue.of(1, 4)), _share("أم", 1, ShareValue.of(1, 3))]
    excluded = compute_tasil(shares, AdjustmentType.RADD)
    assert excluded.entry("زوجة").fraction == Fraction(1, 4)
    assert excluded.entry("أم").fraction == Fraction(3, 4)
    included = compute_tasil(shares, AdjustmentType.RADD, SolverConfig(spouse_radd=True))
    assert included.entry("زوجة").fraction == Fraction(3, 7)
    assert included.entry("أم").fraction == Fraction(4, 7)


@pytest.mark.parametrize(
    "values, expected",
    [
        ([ShareValue.of(1, 2), ShareValue.of(2, 3)], AdjustmentType.AWL),
        ([ShareValue.of(1, 6), ShareValue.of(2, 3)], AdjustmentType.RADD),
        ([ShareValue.of(1, 2), ShareValue.of(1, 2)], AdjustmentType.NONE),
        ([ShareValue.of(1, 8), RESIDUE], AdjustmentType.NONE),
    ],
)
def test_detect_adjustment(values, expected):
    shares = [_share(f"x{i}", 1, v) for i, v in enumerate(values)]
    assert detect_adjustment(shares) is expected


def test_detect_adjustment_rejects_unreadable_share():
    with pytest.raises(ContractViolation):
        detect_adjustment([ShareEntry("زوجة", 1, None, "ثمن")])


def test_compute_tasil_rejects_wrong_adjustment():
    shares = [_share("زوج", 1, ShareValue.of(1, 2)), _share("أخت شقيقة", 1, ShareValue.of(1, 2))]
    with pytest.raises(ContractViolation):
        compute_tasil(shares, AdjustmentType.AWL)


def test_compute_tasil_rejects_radd_with_residue():
    shares = [_share("زوجة", 1, ShareValue.of(1, 4)), _share("ابن", 1, RESIDUE)]
    with pytest.raises(ContractViolation):
        compute_tasil(shares, AdjustmentType.RADD)


def test_solver_trace_mentions_adjustment():
    solution = FiqhSolver().solve(parse_case(WORKED_CASES["table2"][0]))
    assert "adjustment: عول" in solution.summary()
    assert "total shares: 27" in solution.summary()
