"""Canonical identifier types: DOIs, ISSNs, date ranges, keyword lists.

Every other module works in terms of the normalized forms defined here, so
that set unions and deduplication are well-defined across data sources.
All types are immutable values.
"""

from __future__ import annotations

import calendar
import datetime as dt
import re
from dataclasses import dataclass, field

from .errors import (
    InvalidDateRange,
    InvalidKeyword,
    IssnChecksumFailed,
    MalformedDoi,
    MalformedIssn,
)

# URL/scheme prefixes stripped during DOI normalization, matched
# case-insensitively. Anything left over must start with "10.".
_DOI_PREFIXES = (
    "https://doi.org/",
    "http://doi.org/",
    "https://dx.doi.org/",
    "doi:",
)

_ISSN_SHAPE = re.compile(r"^\d{4}-?\d{3}[\dXx]$")


@dataclass(frozen=True, order=True)
class DOI:
    """A normalized digital object identifier (lowercase, no URL prefix)."""

    value: str

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, order=True)
class ISSN:
    """A validated ISSN in canonical hyphenated uppercase form."""

    value: str

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class PartialDate:
    """A possibly incomplete calendar date (year, optional month and day).

    Upstream metadata frequently carries year-only or year-month publication
    dates; comparisons expand the missing parts to the earliest or latest
    consistent full date.
    """

    year: int
    month: int | None = None
    day: int | None = None

    def earliest(self) -> dt.date:
        return dt.date(self.year, self.month or 1, self.day or 1)

    def latest(self) -> dt.date:
        month = self.month or 12
        day = self.day or calendar.monthrange(self.year, month)[1]
        return dt.date(self.year, month, day)

    def isoformat(self) -> str:
        parts = [f"{self.year:04d}"]
        if self.month is not None:
            parts.append(f"{self.month:02d}")
            if self.day is not None:
                parts.append(f"{self.day:02d}")
        return "-".join(parts)

    @classmethod
    def from_parts(cls, parts: list) -> "PartialDate | None":
        """Build from a date-parts list like [2020, 5] or [[2020, 5, 1]]."""
        if parts and isinstance(parts[0], list):
            parts = parts[0]
        if not parts or parts[0] is None:
            return None
        year = int(parts[0])
        month = int(parts[1]) if len(parts) > 1 and parts[1] is not None else None
        day = int(parts[2]) if len(parts) > 2 and parts[2] is not None else None
        return cls(year, month, day)


@dataclass(frozen=True)
class DateRange:
    """An inclusive calendar date range."""

    start: dt.date
    end: dt.date

    def __post_init__(self):
        if not isinstance(self.start, dt.date) or not isinstance(self.end, dt.date):
            raise InvalidDateRange("DateRange endpoints must be calendar dates")
        if self.start > self.end:
            raise InvalidDateRange(
                f"invalid DateRange: from {self.start.isoformat()} is after until {self.end.isoformat()}"
            )

    @classmethod
    def parse(cls, start: str, end: str) -> "DateRange":
        try:
            return cls(dt.date.fromisoformat(start), dt.date.fromisoformat(end))
        except ValueError as exc:
            raise InvalidDateRange(f"invalid DateRange: {exc}") from exc

    def contains(self, date: PartialDate | None, permissive: bool = True) -> bool:
        """Whether a (partial) date falls inside the range.

        Permissive mode keeps a partial date if any completion of it fits;
        strict mode requires every completion to fit. Undated entries are
        kept in permissive mode only.
        """
        if date is None:
            return permissive
        if permissive:
            return date.latest() >= self.start and date.earliest() <= self.end
        return date.earliest() >= self.start and date.latest() <= self.end


@dataclass(frozen=True)
class KeywordList:
    """An ordered list of non-empty search terms; may be empty."""

    terms: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for term in self.terms:
            if not term or not term.strip():
                raise InvalidKeyword("keyword terms must be non-empty")

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @classmethod
    def parse(cls, text: str) -> "KeywordList":
        """Split a comma-separated keyword string, dropping empty tokens."""
        terms = tuple(t.strip() for t in text.split(",") if t.strip())
        return cls(terms)


def normalize_doi(raw: str) -> DOI:
    """Normalize a raw DOI string to canonical lowercase form.

    Strips surrounding whitespace and the common URL / "doi:" prefixes,
    lowercases the rest (DOIs are case-insensitive), and leaves any
    percent-encoding untouched. Idempotent.
    """
    candidate = raw.strip()
    if not candidate:
        raise MalformedDoi(raw)
    lowered = candidate.lower()
    for prefix in _DOI_PREFIXES:
        if lowered.startswith(prefix):
            candidate = candidate[len(prefix):]
            lowered = lowered[len(prefix):]
            break
    candidate = candidate.strip().lower()
    if not candidate.startswith("10.") or "/" not in candidate:
        raise MalformedDoi(raw)
    return DOI(candidate)


def parse_doi_list(text: str) -> list[DOI]:
    """Parse comma- or newline-separated DOIs into a deduplicated list.

    Tokens are trimmed, empty tokens dropped, each remaining token
    normalized; first-occurrence order is preserved and duplicates (after
    normalization) removed. A malformed token raises MalformedDoi carrying
    the token and its 1-based position among the non-empty tokens.
    """
    tokens = [t.strip() for t in re.split(r"[,\r\n]+", text)]
    tokens = [t for t in tokens if t]
    seen: set[str] = set()
    result: list[DOI] = []
    for position, token in enumerate(tokens, start=1):
        try:
            doi = normalize_doi(token)
        except MalformedDoi as exc:
            raise MalformedDoi(token, position) from exc
        if doi.value not in seen:
            seen.add(doi.value)
            result.append(doi)
    return result


def _issn_checksum_ok(digits: str) -> bool:
    """ISO 3297 mod-11 check over an unhyphenated 8-character body."""
    total = sum(int(c) * (8 - i) for i, c in enumerate(digits[:7]))
    check = 10 if digits[7] == "X" else int(digits[7])
    return (total + check) % 11 == 0


def validate_issn(raw: str) -> ISSN:
    """Validate an ISSN (with or without hyphen) and canonicalize it.

    The canonical form is hyphenated uppercase ("NNNN-NNNC"). Shape errors
    raise MalformedIssn; a failed mod-11 check digit raises
    IssnChecksumFailed.
    """
    candidate = raw.strip()
    if not _ISSN_SHAPE.match(candidate):
        raise MalformedIssn(raw)
    digits = candidate.replace("-", "").upper()
    if not _issn_checksum_ok(digits):
        raise IssnChecksumFailed(raw)
    return ISSN(f"{digits[:4]}-{digits[4:]}")
