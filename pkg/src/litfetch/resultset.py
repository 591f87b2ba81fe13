"""Deduplicated, provenance-carrying search result collections.

A ResultSet is the value every search produces: an ordered list of works,
unique by DOI, each annotated with where it came from (which journal was
handsearched, or which seed was snowballed). Merging two sets is a
DOI-keyed union that keeps the left operand's metadata on collision and
concatenates provenance.
"""

from __future__ import annotations

import datetime as dt
import logging
from dataclasses import dataclass, field
from typing import Literal

from .ids import DOI, ISSN, DateRange, PartialDate, normalize_doi, validate_issn
from .metadata import WorkMetadata

logger = logging.getLogger(__name__)

SourceKind = Literal["handsearch", "snowball-forward", "snowball-backward"]


@dataclass(frozen=True)
class SourceTag:
    """Provenance of one retrieval: what kind of search, from which origin."""

    kind: SourceKind
    origin: str  # canonical ISSN for handsearch, canonical DOI for snowball
    query_id: str

    def __post_init__(self):
        # Origin shape must match the search kind; reject early so bogus
        # provenance never reaches a report.
        if self.kind == "handsearch":
            validate_issn(self.origin)
        elif self.kind in ("snowball-forward", "snowball-backward"):
            normalize_doi(self.origin)
        else:
            raise ValueError(f"unknown source kind: {self.kind!r}")


@dataclass
class ResultEntry:
    work: WorkMetadata
    provenance: list[SourceTag]


@dataclass
class ResultSet:
    """Ordered, DOI-deduplicated collection of works with provenance."""

    entries: list[ResultEntry] = field(default_factory=list)
    created_at: dt.datetime = field(
        default_factory=lambda: dt.datetime.now(dt.timezone.utc)
    )

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, doi: DOI) -> bool:
        return any(e.work.doi == doi for e in self.entries)

    @classmethod
    def build(cls, works: list[WorkMetadata], tag: SourceTag,
              created_at: dt.datetime | None = None) -> "ResultSet":
        """Build a set from retrieved works in first-retrieval order."""
        entries: list[ResultEntry] = []
        seen: set[str] = set()
        for work in works:
            if work.doi.value in seen:
                continue
            seen.add(work.doi.value)
            entries.append(ResultEntry(work, [tag]))
        kwargs = {"created_at": created_at} if created_at is not None else {}
        return cls(entries, **kwargs)

    def to_jsonable(self) -> dict:
        return {
            "created_at": self.created_at.isoformat(),
            "entries": [
                {
                    "work": entry.work.to_jsonable(),
                    "provenance": [
                        {"kind": t.kind, "origin": t.origin, "query_id": t.query_id}
                        for t in entry.provenance
                    ],
                }
                for entry in self.entries
            ],
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "ResultSet":
        entries = [
            ResultEntry(
                WorkMetadata.from_jsonable(item["work"]),
                [SourceTag(**tag) for tag in item["provenance"]],
            )
            for item in data["entries"]
        ]
        return cls(entries, created_at=dt.datetime.fromisoformat(data["created_at"]))


def merge(a: ResultSet, b: ResultSet) -> ResultSet:
    """DOI-keyed union of two result sets.

    Keeps left-operand order, then appends right-only entries in their own
    order. On a DOI collision the left metadata wins and the provenance
    lists are concatenated and deduplicated; divergent metadata for the
    same DOI is logged, never merged.
    """
    merged: list[ResultEntry] = []
    by_doi: dict[str, ResultEntry] = {}
    for entry in a.entries:
        clone = ResultEntry(entry.work, list(entry.provenance))
        merged.append(clone)
        by_doi[entry.work.doi.value] = clone
    for entry in b.entries:
        existing = by_doi.get(entry.work.doi.value)
        if existing is None:
            clone = ResultEntry(entry.work, list(entry.provenance))
            merged.append(clone)
            by_doi[entry.work.doi.value] = clone
            continue
        if existing.work != entry.work:
            logger.info("divergent metadata for %s; keeping first-fetched copy",
                        entry.work.doi)
        seen_tags = set(existing.provenance)
        for tag in entry.provenance:
            if tag not in seen_tags:
                existing.provenance.append(tag)
                seen_tags.add(tag)
    return ResultSet(merged, created_at=a.created_at)


def filter_by_daterange(rs: ResultSet, range: DateRange) -> ResultSet:
    """Keep entries whose published date can fall inside the range.

    Partial dates are treated permissively: an entry is kept if any
    completion of its partial date lies in the range. This is a client-side
    re-check for display; the server-side filter stays authoritative.
    """
    kept = [
        ResultEntry(e.work, list(e.provenance))
        for e in rs.entries
        if range.contains(e.work.published, permissive=True)
    ]
    return ResultSet(kept, created_at=rs.created_at)


def doi_set(rs: ResultSet) -> list[DOI]:
    """DOIs in entry order; unique by construction."""
    return [entry.work.doi for entry in rs.entries]
