"""Value normalization used by matching, entailment, and revision checks.

Normalization is deterministic and purely for comparison; surface text is
never rewritten in reports.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass

_WS_RE = re.compile(r"\s+")
_OUTER_PUNCT = ".,;:!?'\"()[]{}"
_INT_RE = re.compile(r"^[+-]?\d+(?:,\d{3})*$")
_ISO_DATE_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")
_MDY_DATE_RE = re.compile(r"^([a-z]+)\.?\s+(\d{1,2})(?:st|nd|rd|th)?,?\s+(\d{4})$")
_DMY_DATE_RE = re.compile(r"^(\d{1,2})(?:st|nd|rd|th)?\s+(?:of\s+)?([a-z]+)\.?,?\s+(\d{4})$")

_UNITS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
    "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18,
    "nineteen": 19,
}
_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}
_MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5,
    "june": 6, "july": 7, "august": 8, "september": 9, "october": 10,
    "november": 11, "december": 12,
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "jun": 6, "jul": 7,
    "aug": 8, "sep": 9, "sept": 9, "oct": 10, "nov": 11, "dec": 12,
}


def normalize_text(s: str) -> str:
    """Lowercase, collapse internal whitespace, and strip the ends."""
    return _WS_RE.sub(" ", s).strip().lower()


def _strip_outer_punct(s: str) -> str:
    return s.strip(_OUTER_PUNCT + " ")


def _parse_spelled_number(s: str) -> int | None:
    """Spelled-out 0-100; compounds accept a hyphen or a space."""
    if s in _UNITS:
        return _UNITS[s]
    if s in _TENS:
        return _TENS[s]
    if s in ("hundred", "one hundred", "a hundred"):
        return 100
    m = re.match(r"^([a-z]+)[-\s]([a-z]+)$", s)
    if m and m.group(1) in _TENS and m.group(2) in _UNITS and _UNITS[m.group(2)] > 0:
        return _TENS[m.group(1)] + _UNITS[m.group(2)]
    return None


def _parse_date(s: str) -> datetime.date | None:
    m = _ISO_DATE_RE.match(s)
    if m:
        y, mo, d = (int(g) for g in m.groups())
    else:
        m = _MDY_DATE_RE.match(s)
        if m:
            month_name, d, y = m.group(1), int(m.group(2)), int(m.group(3))
        else:
            m = _DMY_DATE_RE.match(s)
            if not m:
                return None
            d, month_name, y = int(m.group(1)), m.group(2), int(m.group(3))
        mo = _MONTHS.get(month_name, 0)
        if not mo:
            return None
    try:
        return datetime.date(y, mo, d)
    except ValueError:
        return None


@dataclass(frozen=True)
class NormalizedValue:
    """A comparison value: typed number, date, or normalized text."""

    kind: str  # "number" | "date" | "text"
    value: int | datetime.date | str

    @property
    def as_text(self) -> str:
        """Canonical string form (numbers plain, dates ISO)."""
        if self.kind == "date":
            return self.value.isoformat()  # type: ignore[union-attr]
        return str(self.value)


def normalize_value(v: str) -> NormalizedValue:
    """Parse a surface value into a typed comparison value.

    Total function: trims, lowercases, and strips surrounding punctuation;
    recognises integers (optionally comma-grouped), spelled-out numbers
    0-100, and ISO or natural-language dates; anything else stays text.
    """
    s = _strip_outer_punct(normalize_text(v))
    if not s:
        return NormalizedValue("text", "")
    if _INT_RE.match(s):
        return NormalizedValue("number", int(s.replace(",", "")))
    spelled = _parse_spelled_number(s)
    if spelled is not None:
        return NormalizedValue("number", spelled)
    date = _parse_date(s)
    if date is not None:
        return NormalizedValue("date", date)
    return NormalizedValue("text", s)


def _needle_forms(needle: str) -> list[str]:
    forms = []
    typed = normalize_value(needle).as_text
    plain = _strip_outer_punct(normalize_text(needle))
    for f in (typed, plain):
        if f and f not in forms:
            forms.append(f)
    return forms


def contains_normalized(haystack: str, needle: str) -> bool:
    """True when the needle occurs in the haystack in normalize-space.

    Both the typed form (e.g. "fifty" -> "50") and the plain normalized
    form of the needle are searched, guarded against matching inside a
    longer word or number. The haystack is also scanned with each of its
    tokens replaced by its typed form, so "fifty" in the haystack matches
    a needle of "50".
    """
    h = normalize_text(haystack)
    h_typed = " ".join(normalize_value(tok).as_text for tok in h.split(" "))
    for form in _needle_forms(needle):
        pattern = r"(?<!\w)" + re.escape(form) + r"(?!\w)"
        if re.search(pattern, h) or re.search(pattern, h_typed):
            return True
    return False
