"""The WorkMetadata record: one retrieved work, normalized.

Shared by the API clients (which produce it), result sets (which collect
it) and exporters (which serialize it). Publishers may withhold abstracts
and references, so those fields are optional / possibly empty by contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ids import DOI, ISSN, PartialDate


@dataclass(frozen=True)
class Author:
    family: str = ""
    given: str = ""

    def display(self) -> str:
        if self.family and self.given:
            return f"{self.family}, {self.given}"
        return self.family or self.given


@dataclass
class WorkMetadata:
    doi: DOI
    title: str = ""
    authors: list[Author] = field(default_factory=list)
    container_title: str = ""
    publisher: str = ""
    issn_list: list[ISSN] = field(default_factory=list)
    published: PartialDate | None = None
    abstract: str | None = None
    subject_keywords: list[str] = field(default_factory=list)
    url: str | None = None
    reference_dois: list[DOI] = field(default_factory=list)
    reference_count_declared: int = 0

    def __post_init__(self):
        # Keep the type invariant cheap to rely on: reference DOIs are
        # always unique. (Fewer resolvable DOIs than declared references is
        # expected; publishers deposit incompletely.)
        seen: set[str] = set()
        unique: list[DOI] = []
        for ref in self.reference_dois:
            if ref.value not in seen:
                seen.add(ref.value)
                unique.append(ref)
        self.reference_dois = unique

    @classmethod
    def stub(cls, doi: DOI) -> "WorkMetadata":
        """A DOI-only record for works that could not be hydrated."""
        return cls(doi=doi)

    def is_stub(self) -> bool:
        return not self.title and not self.authors and self.published is None

    def to_jsonable(self) -> dict:
        return {
            "doi": self.doi.value,
            "title": self.title,
            "authors": [{"family": a.family, "given": a.given} for a in self.authors],
            "container_title": self.container_title,
            "publisher": self.publisher,
            "issn_list": [i.value for i in self.issn_list],
            "published": {
                "year": self.published.year,
                "month": self.published.month,
                "day": self.published.day,
            } if self.published else None,
            "abstract": self.abstract,
            "subject_keywords": list(self.subject_keywords),
            "url": self.url,
            "reference_dois": [d.value for d in self.reference_dois],
            "reference_count_declared": self.reference_count_declared,
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "WorkMetadata":
        published = data.get("published")
        return cls(
            doi=DOI(data["doi"]),
            title=data.get("title", ""),
            authors=[Author(**a) for a in data.get("authors", [])],
            container_title=data.get("container_title", ""),
            publisher=data.get("publisher", ""),
            issn_list=[ISSN(v) for v in data.get("issn_list", [])],
            published=PartialDate(**published) if published else None,
            abstract=data.get("abstract"),
            subject_keywords=list(data.get("subject_keywords", [])),
            url=data.get("url"),
            reference_dois=[DOI(v) for v in data.get("reference_dois", [])],
            reference_count_declared=data.get("reference_count_declared", 0),
        )
