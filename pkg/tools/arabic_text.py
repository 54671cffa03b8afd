"""
Arabic text helpers: tatweel removal, spelling folds used for matching, and
digit conversion.
"""

import re

TATWEEL = "ـ"

_TATWEEL_RE = re.compile(TATWEEL + "+")
_SPACES_RE = re.compile(r"\s+")
_DIGITS = str.maketrans("٠١٢٣٤٥٦٧٨٩۰۱۲۳۴۵۶۷۸۹", "01234567890123456789")
_MATCH_FOLDS = str.maketrans({"ى": "ي", "أ": "ا", "إ": "ا", "آ": "ا"})

RESIDUE_SPELLING_FIXES = (("باقى", "باقي"),)


def strip_tatweel(text: str) -> str:
    return _TATWEEL_RE.sub("", text)


def clean(text: str) -> str:
    """Remove tatweel, collapse whitespace and trim."""
    if not text:
        return ""
    return _SPACES_RE.sub(" ", strip_tatweel(text)).strip()


def match_key(text: str) -> str:
    """
    Key for lookups only: cleaned text with alef-maqsura/ya and hamza-alef
    variants folded. Never written back into a record.
    """
    return clean(text).translate(_MATCH_FOLDS)


def latin_digits(text: str) -> str:
    return text.translate(_DIGITS)


def fix_spelling(text: str) -> str:
    """Apply the known spelling corrections (currently باقى -> باقي)."""
    for wrong, right in RESIDUE_SPELLING_FIXES:
        text = text.replace(wrong, right)
    return text
