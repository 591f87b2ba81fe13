"""Serialize result sets to the supported interchange formats.

Three writers (DOI text, CSV, RIS) plus an RIS reader used to validate
negotiated records and to round-trip what we emit. Wire forms are exact:

* DOI text: UTF-8, one DOI per line, LF endings, trailing newline, no header.
* CSV: RFC 4180, fixed header ``DOI,Title,Authors,Journal,Publisher,Year,
  Month,Day,Abstract,URL``.
* RIS: ``AA  - value`` lines, TY first, ER last, one blank line between
  records, LF endings.
"""

from __future__ import annotations

import csv
import io
import logging
import re
from dataclasses import dataclass

from .errors import (
    ContentTypeUnavailable,
    InvalidRecord,
    NetworkError,
    ParseError,
    WorkNotFound,
)
from .metadata import WorkMetadata
from .resultset import ResultSet

logger = logging.getLogger(__name__)

_TAG_LINE = re.compile(r"^([A-Z][A-Z0-9])  - (.*)$")

CSV_HEADER = ["DOI", "Title", "Authors", "Journal", "Publisher",
              "Year", "Month", "Day", "Abstract", "URL"]


@dataclass
class RISRecord:
    """An ordered list of (tag, value) pairs framed by TY and ER."""

    fields: list[tuple[str, str]]

    def validate(self) -> None:
        if not self.fields:
            raise InvalidRecord("empty record")
        first_tag, first_value = self.fields[0]
        if first_tag != "TY" or not first_value:
            raise InvalidRecord("record must begin with a non-empty TY tag")
        last_tag, last_value = self.fields[-1]
        if last_tag != "ER":
            raise InvalidRecord("record must end with ER")
        if last_value:
            raise InvalidRecord("ER tag must carry no value")
        for tag, value in self.fields:
            if not re.fullmatch(r"[A-Z][A-Z0-9]", tag):
                raise InvalidRecord(f"bad tag: {tag!r}")
            if re.search(r"[\r\n]", value):
                raise InvalidRecord(f"value for {tag} contains a line separator")
            if any(ord(c) < 0x20 and c != "\t" for c in value):
                raise InvalidRecord(f"value for {tag} contains control characters")


def ris_serialize(record: RISRecord) -> str:
    """Serialize one record to its exact wire form (LF endings)."""
    record.validate()
    return "".join(f"{tag}  - {value}\n" for tag, value in record.fields)


def ris_parse(text: str) -> list[RISRecord]:
    """Tolerant RIS reader: accepts CRLF or LF, skips blank lines between
    records, rejects lines that do not match the tag grammar."""
    records: list[RISRecord] = []
    current: list[tuple[str, str]] | None = None
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip():
            if current is not None:
                raise ParseError("blank line inside a record", lineno)
            continue
        match = _TAG_LINE.match(line)
        if match is None:
            raise ParseError(f"not a tag line: {line!r}", lineno)
        tag, value = match.group(1), match.group(2)
        if current is None:
            if tag != "TY":
                raise ParseError(f"record must start with TY, got {tag}", lineno)
            current = []
        current.append((tag, value))
        if tag == "ER":
            record = RISRecord(current)
            record.validate()
            records.append(record)
            current = None
    if current is not None:
        raise ParseError("unterminated record (missing ER)", lineno)
    return records


def to_doi_text(rs: ResultSet) -> str:
    """One DOI per line in entry order; empty set serializes to ""."""
    if not rs.entries:
        return ""
    return "".join(f"{entry.work.doi.value}\n" for entry in rs.entries)


def to_csv(rs: ResultSet, crlf: bool = False) -> str:
    """RFC 4180 table with the fixed column header.

    Authors are joined with "; " as "Family, Given"; absent fields are
    empty. Line endings default to LF; set ``crlf`` for strict RFC output.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n" if crlf else "\n")
    writer.writerow(CSV_HEADER)
    for entry in rs.entries:
        w = entry.work
        pub = w.published
        writer.writerow([
            w.doi.value,
            w.title,
            "; ".join(a.display() for a in w.authors),
            w.container_title,
            w.publisher,
            str(pub.year) if pub else "",
            str(pub.month) if pub and pub.month is not None else "",
            str(pub.day) if pub and pub.day is not None else "",
            w.abstract or "",
            w.url or "",
        ])
    return buf.getvalue()


def _single_line(value: str) -> str:
    return re.sub(r"[\r\n\t]+", " ", value).strip()


def work_to_ris_record(work: WorkMetadata) -> RISRecord:
    """Map one work onto RIS tags.

    TY is JOUR when the work has a journal container, else GEN. DA carries
    "YYYY/MM/DD" with absent parts omitted. SN carries the first ISSN.
    """
    fields: list[tuple[str, str]] = []
    fields.append(("TY", "JOUR" if work.container_title else "GEN"))
    if work.title:
        fields.append(("TI", _single_line(work.title)))
    for author in work.authors:
        name = author.display()
        if name:
            fields.append(("AU", _single_line(name)))
    if work.container_title:
        fields.append(("JO", _single_line(work.container_title)))
    if work.published:
        fields.append(("PY", str(work.published.year)))
        da = f"{work.published.year:04d}"
        if work.published.month is not None:
            da += f"/{work.published.month:02d}"
            if work.published.day is not None:
                da += f"/{work.published.day:02d}"
        fields.append(("DA", da))
    if work.abstract:
        fields.append(("AB", _single_line(work.abstract)))
    fields.append(("DO", work.doi.value))
    if work.url:
        fields.append(("UR", work.url))
    if work.publisher:
        fields.append(("PB", _single_line(work.publisher)))
    if work.issn_list:
        fields.append(("SN", work.issn_list[0].value))
    fields.append(("ER", ""))
    return RISRecord(fields)


@dataclass
class RisExport:
    """RIS output plus how many records fell back to assembled mode."""

    text: str
    fallbacks: int = 0


def to_ris(rs: ResultSet, mode: str = "assembled", client=None) -> RisExport:
    """Serialize a result set as RIS.

    Assembled mode maps our metadata onto RIS tags locally. Negotiated
    mode asks the DOI resolver for each record via content negotiation
    (``client`` must be a CrossrefClient) and keeps the returned text
    verbatim; records the resolver cannot produce, or that fail to parse,
    fall back to assembled mode and are counted.
    """
    if mode not in ("assembled", "negotiated"):
        raise ValueError(f"unknown RIS mode: {mode!r}")
    if mode == "negotiated" and client is None:
        raise ValueError("negotiated mode requires a client")
    blocks: list[str] = []
    fallbacks = 0
    for entry in rs.entries:
        if mode == "negotiated":
            try:
                body = client.negotiate_ris(entry.work.doi)
                ris_parse(body)  # validate before trusting the resolver
                blocks.append(body if body.endswith("\n") else body + "\n")
                continue
            except (WorkNotFound, ContentTypeUnavailable, NetworkError, ParseError) as exc:
                logger.warning("RIS negotiation failed for %s (%s); assembling locally",
                               entry.work.doi, exc)
                fallbacks += 1
        blocks.append(ris_serialize(work_to_ris_record(entry.work)))
    return RisExport("\n".join(blocks), fallbacks)


EXPORT_EXTENSIONS = {"doi": "txt", "ris": "ris", "csv": "csv"}
