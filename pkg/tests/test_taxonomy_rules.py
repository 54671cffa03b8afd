import shutil

import pytest

from core.conditions import compile_condition
from core.errors import LabelResolutionError, RuleSyntaxError
from core.rule_tables import BLOCKING_FILE, SHARES_FILE, default_rulebook, load_rulebook, parse_share_expr
from core.table_files import DEFAULT_RULES_DIR
from core.taxonomy import TAXONOMY_FILE, default_taxonomy


class _Counts:
    def __init__(self, present, mentioned=None):
        self._present = present
        self._mentioned = mentioned if mentioned is not None else present

    def present(self, label):
        return self._present.get(label, 0)

    def mentioned(self, label):
        return self._mentioned.get(label, 0)


@pytest.fixture
def rules_copy(tmp_path):
    target = tmp_path / "rules"
    shutil.copytree(DEFAULT_RULES_DIR, target)
    return target


def test_taxonomy_has_36_categories():
    taxonomy = default_taxonomy()
    assert len(taxonomy) == 36
    labels = [c.canonical_label for c in taxonomy.categories]
    assert len(set(labels)) == 36
    assert labels[:2] == ["زوج", "زوجة"]


@pytest.mark.parametrize(
    "raw, canonical",
    [
        ("والدة", "أم"),
        ("الوالد", "أب"),
        ("ولد", "ابن"),
        ("جد", "أب الأب"),
        ("الأخـت الشقيقة", "أخت شقيقة"),
        ("اخ لاب", "أخ لأب"),
    ],
)
def test_variant_spellings_resolve(raw, canonical):
    assert default_taxonomy().resolve(raw).canonical_label == canonical


def test_unknown_label():
    with pytest.raises(LabelResolutionError) as info:
        default_taxonomy().resolve("صديق")
    assert info.value.raw == "صديق"


def test_groups():
    taxonomy = default_taxonomy()
    assert set(taxonomy.members("@uterine")) == {"أخ لأم", "أخت لأم"}
    assert set(taxonomy.members("grandfather")) == {"أب الأب", "أب أب الأب"}
    assert len(taxonomy.members("all")) == 36
    with pytest.raises(KeyError):
        taxonomy.members("@cousins")


def test_sort_labels_uses_taxonomy_order():
    taxonomy = default_taxonomy()
    assert taxonomy.sort_labels(["عم شقيق", "زوجة", "أم"]) == ["زوجة", "أم", "عم شقيق"]


def test_condition_evaluation():
    taxonomy = default_taxonomy()
    condition = compile_condition("not has(ابن) and count(@female_descendant) >= 2", taxonomy)
    assert condition.evaluate(_Counts({"بنت": 2}))
    assert condition.evaluate(_Counts({"بنت": 1, "بنت ابن": 1}))
    assert not condition.evaluate(_Counts({"بنت": 2, "ابن": 1}))
    assert not condition.evaluate(_Counts({"بنت": 1}))


def test_mentioned_sees_the_whole_scenario():
    condition = compile_condition("mentioned(@sibling) >= 2", default_taxonomy())
    assert condition.evaluate(_Counts({}, {"أخ شقيق": 1, "أخت لأم": 1}))
    assert not condition.evaluate(_Counts({"أخ شقيق": 2}, {}))


def test_condition_references_follow_polarity():
    condition = compile_condition("has(ابن) and not has(أب) and count(بنت) == 0", default_taxonomy())
    assert condition.references(True) == {"ابن"}
    assert condition.references(False) == {"أب", "بنت"}


def test_defines_are_inlined():
    taxonomy = default_taxonomy()
    defines = {"descendant": compile_condition("has(@descendant)", taxonomy)}
    condition = compile_condition("not $descendant", taxonomy, defines)
    assert condition.evaluate(_Counts({"أم": 1}))
    assert not condition.evaluate(_Counts({"بنت ابن": 1}))


@pytest.mark.parametrize("text", ["has(ابن", "has(صديق)", "count(ابن) >= x", "$missing", "has(ابن) or"])
def test_condition_syntax_errors(text):
    with pytest.raises(RuleSyntaxError):
        compile_condition(text, default_taxonomy())


def test_share_expressions():
    taxonomy = default_taxonomy()
    assert parse_share_expr("residue", taxonomy).kind == "residue"
    shared = parse_share_expr("1/6 shared @grandmother", taxonomy)
    assert shared.kind == "shared" and len(shared.group) == 5
    assert parse_share_expr("1/3 after @spouse", taxonomy).kind == "after"
    assert parse_share_expr("1/6 plus residue", taxonomy).kind == "plus_residue"
    assert str(parse_share_expr("2/3", taxonomy)) == "2/3"


def test_every_category_has_share_rules():
    rulebook = default_rulebook()
    for category in rulebook.taxonomy.categories:
        assert rulebook.share_rules(category.canonical_label)


def test_blocking_is_antisymmetric():
    pairs = default_rulebook().blocking_pairs()
    assert pairs
    for blocker, blocked in pairs:
        assert (blocked, blocker) not in pairs


def test_blockers_come_earlier_in_taxonomy_order():
    rulebook = default_rulebook()
    taxonomy = rulebook.taxonomy
    for blocker, blocked in rulebook.blocking_pairs():
        assert taxonomy.order_of(blocker) < taxonomy.order_of(blocked)


def test_rulebook_versions():
    assert default_rulebook().versions == {"heirs": "1", "blocking": "1", "shares": "1"}


def test_self_blocking_rule_rejected(rules_copy):
    with (rules_copy / BLOCKING_FILE).open("a", encoding="utf-8") as handle:
        handle.write("ابن | has(ابن) | impossible\n")
    with pytest.raises(RuleSyntaxError, match="cannot block itself"):
        load_rulebook(rules_copy)


def test_forward_reference_rejected(rules_copy):
    with (rules_copy / BLOCKING_FILE).open("a", encoding="utf-8") as handle:
        handle.write("أب | has(عم شقيق) | wrong direction\n")
    with pytest.raises(RuleSyntaxError, match="decided after"):
        load_rulebook(rules_copy)


def test_missing_share_rule_rejected(rules_copy):
    path = rules_copy / SHARES_FILE
    lines = path.read_text(encoding="utf-8").splitlines()
    path.write_text("\n".join(l for l in lines if not l.startswith("عم الأب |")) + "\n", encoding="utf-8")
    with pytest.raises(RuleSyntaxError, match="No share rule for: عم الأب"):
        load_rulebook(rules_copy)


def test_missing_version_header_rejected(rules_copy):
    path = rules_copy / TAXONOMY_FILE
    lines = path.read_text(encoding="utf-8").splitlines()
    path.write_text("\n".join(lines[1:]) + "\n", encoding="utf-8")
    with pytest.raises(RuleSyntaxError, match="version"):
        load_rulebook(rules_copy)


def test_conflicting_spelling_rejected(rules_copy):
    with (rules_copy / TAXONOMY_FILE).open("a", encoding="utf-8") as handle:
        handle.write("جار | male | collateral | yes | | والد | not an heir\n")
    with pytest.raises(RuleSyntaxError, match="already belongs"):
        load_rulebook(rules_copy)
