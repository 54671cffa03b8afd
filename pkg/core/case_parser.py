"""
Parser for inheritance questions of the form

    مات وترك: عم لأب و ابن أخ لأب و أربع بنات ابن ... ما هو نصيب كل وريث؟

into a CaseScenario of (category, count) mentions.
"""

from dataclasses import dataclass
from typing import Optional
import logging
import re

from tools.arabic_text import clean, latin_digits, match_key

from .domain import Gender, HeirCategory, RelativeMention
from .errors import CaseFormatError, CaseParseError, LabelResolutionError
from .taxonomy import Taxonomy, default_taxonomy

logger = logging.getLogger(__name__)

# Keys below are match keys: hamza-alef folded to bare alef, alef maqsura to ya.
NUMBER_WORDS = {
    "واحد": 1, "واحدة": 1,
    "اثنان": 2, "اثنين": 2, "اثنتان": 2, "اثنتين": 2, "ثنتان": 2, "ثنتين": 2,
    "ثلاث": 3, "ثلاثة": 3,
    "اربع": 4, "اربعة": 4,
    "خمس": 5, "خمسة": 5,
    "ست": 6, "ستة": 6,
    "سبع": 7, "سبعة": 7,
    "ثمان": 8, "ثماني": 8, "ثمانية": 8,
    "تسع": 9, "تسعة": 9,
    "عشر": 10, "عشرة": 10,
}

PLURAL_HEADS = {
    "بنات": "بنت",
    "ابناء": "ابن",
    "اخوات": "اخت",
    "اخوة": "اخ",
    "اخوان": "اخ",
    "اعمام": "عم",
    "زوجات": "زوجة",
    "جدات": "جدة",
}

DUAL_HEADS = {
    "اخوين": "اخ",
    "اخوان": "اخ",
}

SINGULAR_HEADS = {"ابن", "بنت", "ابنة", "اخ", "اخت", "عم", "زوجة", "جد", "جدة"}

MODIFIERS = {
    "شقيقات": "شقيقة",
    "شقيقتين": "شقيقة",
    "شقيقتان": "شقيقة",
    "اشقاء": "شقيق",
    "شقيقين": "شقيق",
    "شقيقان": "شقيق",
}

_DECEASED_RE = re.compile(
    r"^\s*(?P<verb>ماتت|مات|توفيت|توفي)\s+(?:وتركت|وترك|وخلفت|وخلف)\s*:?\s*(?P<body>.*)$",
    re.DOTALL,
)
_END_RE = re.compile(r"[.؟?]|\bما هو\b|\bفما\b")
_ITEM_SPLIT_RE = re.compile(r"\s*[،,]\s*|\s+و\s+")
_FEMALE_VERBS = {"ماتت", "توفيت"}


@dataclass(frozen=True)
class CaseScenario:
    """Parsed question: merged mentions in order of first appearance."""

    mentions: tuple[RelativeMention, ...]
    source_text: str = ""
    deceased_gender: Optional[Gender] = None

    def labels(self) -> list[str]:
        return [m.label for m in self.mentions]

    def count_of(self, label: str) -> int:
        return sum(m.count for m in self.mentions if m.label == label)

    def to_question(self) -> str:
        verb = "ماتت وتركت" if self.deceased_gender is Gender.FEMALE else "مات وترك"
        items = [m.label if m.count == 1 else f"{m.count} {m.label}" for m in self.mentions]
        return f"{verb}: {' و '.join(items)}. ما هو نصيب كل وريث؟"

    def summary(self) -> str:
        lines = [f"Deceased: {self.deceased_gender.value if self.deceased_gender else 'unknown'}"]
        for mention in self.mentions:
            lines.append(f"  {mention.label} x{mention.count}")
        return "\n".join(lines)


def normalize_label(raw: str, taxonomy: Optional[Taxonomy] = None) -> HeirCategory:
    """Resolve a single heir noun phrase to its canonical category."""
    return (taxonomy or default_taxonomy()).resolve(clean(raw))


def _number_value(key: str) -> Optional[int]:
    digits = latin_digits(key)
    if digits.isdigit():
        value = int(digits)
        if value < 1:
            raise CaseParseError(f"Count must be at least 1, got {key!r}", phrase=key)
        return value
    return NUMBER_WORDS.get(key)


def _dual_stem(key: str) -> Optional[str]:
    if key in DUAL_HEADS:
        return DUAL_HEADS[key]
    for suffix in ("ين", "ان"):
        if key.endswith(suffix) and len(key) > len(suffix) + 1:
            stem = key[: -len(suffix)]
            if stem.endswith("ت") and stem[:-1] + "ة" in SINGULAR_HEADS:
                return stem[:-1] + "ة"
            if stem in SINGULAR_HEADS:
                return stem
    return None


def _strip_conjunction(key: str, known: set[str]) -> str:
    """Drop a prefixed و when the word without it is known and the whole word is not."""
    if key.startswith("و") and len(key) > 2 and key not in known:
        rest = key[1:]
        if rest in known or _number_value(rest) or rest in PLURAL_HEADS or _dual_stem(rest):
            return rest
    return key


class _ItemParser:
    """Greedy longest-match segmentation of one enumeration item."""

    def __init__(self, taxonomy: Taxonomy):
        self.taxonomy = taxonomy
        self.known_words = {word for key in taxonomy.variants for word in key.split()}
        self.known_words |= set(NUMBER_WORDS) | set(MODIFIERS)
        self.max_span = max(len(key.split()) for key in taxonomy.variants)

    def conjuncts(self, phrase: str) -> list[list[str]]:
        """Match keys of the phrase, cut wherever a word carries an attached و."""
        groups: list[list[str]] = [[]]
        for word in match_key(phrase).split():
            stripped = _strip_conjunction(word, self.known_words)
            if stripped != word and groups[-1]:
                groups.append([])
            groups[-1].append(MODIFIERS.get(stripped, stripped))
        return [group for group in groups if group]

    def parse(self, phrase: str) -> list[RelativeMention]:
        mentions: list[RelativeMention] = []
        for keys in self.conjuncts(phrase):
            mentions.extend(self._parse_keys(keys, phrase))
        return mentions

    def _parse_keys(self, keys: list[str], phrase: str) -> list[RelativeMention]:
        mentions: list[RelativeMention] = []
        pos = 0
        while pos < len(keys):
            count = _number_value(keys[pos])
            if count is not None:
                pos += 1
                if pos >= len(keys):
                    if mentions:
                        # trailing number: "زوجة واحدة", "أخوان اثنان"
                        last = mentions.pop()
                        mentions.append(RelativeMention(last.label, count))
                        break
                    raise CaseParseError(f"Number without a relative in {phrase!r}", phrase=phrase)
            head = keys[pos]
            implied = None
            plural = False
            # اخوان is a dual without a count word and a plural with one.
            if head in DUAL_HEADS and count is None:
                head, implied = DUAL_HEADS[head], 2
            elif head in PLURAL_HEADS and head not in self.known_words:
                head, plural = PLURAL_HEADS[head], True
            elif head not in self.known_words and _dual_stem(head):
                head, implied = _dual_stem(head), 2
            label, used = self.longest_match([head] + keys[pos + 1:])
            if label is None:
                raise LabelResolutionError(" ".join(keys[pos:]))
            if count is None:
                if plural:
                    raise CaseParseError(f"Plural without a count in {phrase!r}", phrase=phrase)
                count = implied or 1
            mentions.append(RelativeMention(label, count))
            pos += used
        return mentions

    def longest_match(self, keys: list[str]) -> tuple[Optional[str], int]:
        for span in range(min(len(keys), self.max_span), 0, -1):
            canonical = self.taxonomy.variants.get(" ".join(keys[:span]))
            if canonical:
                return canonical, span
        return None, 0


def parse_count(phrase: str, taxonomy: Optional[Taxonomy] = None) -> int:
    """Number of individuals a count phrase refers to; a bare noun is 1."""
    mentions = _ItemParser(taxonomy or default_taxonomy()).parse(clean(phrase))
    if len(mentions) != 1:
        raise CaseParseError(f"Expected one relative in {phrase!r}", phrase=phrase)
    return mentions[0].count


def parse_case(text: str, taxonomy: Optional[Taxonomy] = None) -> CaseScenario:
    taxonomy = taxonomy or default_taxonomy()
    cleaned = clean(text)
    match = _DECEASED_RE.match(match_key(cleaned))
    if not match:
        raise CaseFormatError(f"Not a 'مات وترك:' question: {cleaned[:60]!r}")
    gender = Gender.FEMALE if match.group("verb") in _FEMALE_VERBS else Gender.MALE

    # match_key is length-preserving on cleaned text, so offsets carry over.
    body = cleaned[match.start("body"):]
    end = _END_RE.search(body)
    if end:
        body = body[: end.start()]
    if not body.strip():
        raise CaseFormatError("Empty enumeration after 'مات وترك:'")

    parser = _ItemParser(taxonomy)
    merged: dict[str, int] = {}
    for item in _ITEM_SPLIT_RE.split(body):
        item = item.strip()
        if not item or item == "و":
            continue
        try:
            mentions = parser.parse(item)
        except LabelResolutionError as e:
            raise CaseParseError(f"Unknown relative {item!r}", phrase=item) from e
        for mention in mentions:
            merged[mention.label] = merged.get(mention.label, 0) + mention.count

    if not merged:
        raise CaseFormatError("No relatives found in the enumeration")
    scenario = CaseScenario(
        mentions=tuple(RelativeMention(label, count) for label, count in merged.items()),
        source_text=text,
        deceased_gender=gender,
    )
    if gender is Gender.MALE and "زوج" in merged:
        logger.warning("Male deceased leaves a husband: %s", cleaned[:60])
    if gender is Gender.FEMALE and "زوجة" in merged:
        logger.warning("Female deceased leaves a wife: %s", cleaned[:60])
    return scenario
