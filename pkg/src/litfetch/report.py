"""Reproducibility reports for searches.

A report records everything a reviewer needs to re-run or cross-check a
search: the exact parameters, the data sources queried (with timestamps),
per-origin retrieval counts, and the deduplicated total. The structured
rendering is canonical (key-sorted, fixed UTC timestamp format) so two
identical searches produce byte-identical report files.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from typing import Callable

from .errors import InconsistentCounts

TOOL_VERSION = "0.1.0"

KEYWORD_CAVEAT = "keyword filtering may miss studies"

Clock = Callable[[], dt.datetime]


def utc_now() -> dt.datetime:
    return dt.datetime.now(dt.timezone.utc)


def _stamp(moment: dt.datetime) -> str:
    """UTC, seconds precision, trailing Z; the one timestamp format reports use."""
    return moment.astimezone(dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class DataSource:
    name: str
    base_url: str
    queried_at: dt.datetime


@dataclass
class OriginCount:
    """Per-journal or per-seed tallies."""

    origin: str
    retrieved: int = 0
    failures: int = 0
    unresolvable: int = 0
    note: str = ""


@dataclass
class SearchReport:
    tool_version: str
    query: dict  # canonical serialized query document
    data_sources: list[DataSource]
    per_origin_counts: list[OriginCount]
    total_unique: int
    duplicates_removed: int
    caveats: list[str] = field(default_factory=list)
    outcome: str = "success"  # success | partial | aborted


def build_report(
    query: dict,
    per_origin: list[OriginCount],
    data_sources: list[DataSource],
    total_unique: int,
    outcome: str = "success",
    caveats: list[str] | None = None,
    clock: Clock | None = None,
) -> SearchReport:
    """Assemble a report; deterministic given its inputs and the clock.

    The caveat list is auto-populated: keyworded queries get the
    keyword-filtering warning, forward snowballs get the citation-index
    freshness caveat. Raises InconsistentCounts when the retrieved totals
    cannot reconcile with the unique count on a successful run.
    """
    clock = clock or utc_now
    origins_in_query = _query_origins(query)
    counted = [c.origin for c in per_origin]
    if sorted(counted) != sorted(origins_in_query) or len(set(counted)) != len(counted):
        raise InconsistentCounts(
            f"per-origin counts {counted} do not cover the query origins {origins_in_query}"
        )
    retrieved_total = sum(c.retrieved for c in per_origin)
    duplicates_removed = retrieved_total - total_unique
    if outcome == "success" and duplicates_removed < 0:
        raise InconsistentCounts(
            f"total_unique {total_unique} exceeds retrieved total {retrieved_total}"
        )

    all_caveats = list(caveats or [])
    if query.get("keywords"):
        all_caveats.append(KEYWORD_CAVEAT)
    if query.get("type") == "snowball" and query.get("direction") == "forward":
        source_names = ", ".join(s.name for s in data_sources) or "citation index"
        all_caveats.append(
            f"citation index ({source_names}) updates lag behind publication; "
            f"recently published citing works may be missing "
            f"(queried {_stamp(clock())})"
        )

    return SearchReport(
        tool_version=TOOL_VERSION,
        query=query,
        data_sources=data_sources,
        per_origin_counts=per_origin,
        total_unique=total_unique,
        duplicates_removed=duplicates_removed,
        caveats=all_caveats,
        outcome=outcome,
    )


def _query_origins(query: dict) -> list[str]:
    if query.get("type") == "handsearch":
        return list(query.get("journals", []))
    return list(query.get("seeds", []))


def report_to_jsonable(r: SearchReport) -> dict:
    return {
        "tool_version": r.tool_version,
        "query": r.query,
        "data_sources": [
            {"name": s.name, "base_url": s.base_url, "queried_at": _stamp(s.queried_at)}
            for s in r.data_sources
        ],
        "per_origin_counts": [
            {
                "origin": c.origin,
                "retrieved": c.retrieved,
                "failures": c.failures,
                "unresolvable": c.unresolvable,
                **({"note": c.note} if c.note else {}),
            }
            for c in r.per_origin_counts
        ],
        "total_unique": r.total_unique,
        "duplicates_removed": r.duplicates_removed,
        "caveats": list(r.caveats),
        "outcome": r.outcome,
    }


def report_from_jsonable(data: dict) -> SearchReport:
    return SearchReport(
        tool_version=data["tool_version"],
        query=data["query"],
        data_sources=[
            DataSource(s["name"], s["base_url"],
                       dt.datetime.strptime(s["queried_at"], "%Y-%m-%dT%H:%M:%SZ")
                       .replace(tzinfo=dt.timezone.utc))
            for s in data["data_sources"]
        ],
        per_origin_counts=[
            OriginCount(c["origin"], c["retrieved"], c["failures"],
                        c["unresolvable"], c.get("note", ""))
            for c in data["per_origin_counts"]
        ],
        total_unique=data["total_unique"],
        duplicates_removed=data["duplicates_removed"],
        caveats=list(data["caveats"]),
        outcome=data["outcome"],
    )


def render_report(r: SearchReport, format: str = "structured") -> str:
    """Render a report.

    ``structured`` is the canonical machine-readable form: key-sorted JSON
    with a trailing newline, byte-stable for identical reports. ``human``
    is a readable text block with the same content.
    """
    if format == "structured":
        return json.dumps(report_to_jsonable(r), sort_keys=True, indent=2,
                          ensure_ascii=False) + "\n"
    if format != "human":
        raise ValueError(f"unknown report format: {format!r}")

    lines = []
    lines.append("Search report")
    lines.append("=============")
    lines.append(f"Tool version: {r.tool_version}")
    lines.append(f"Outcome: {r.outcome}")
    lines.append("")
    lines.append("Parameters")
    for key in sorted(r.query):
        lines.append(f"  {key}: {_fmt_value(r.query[key])}")
    lines.append("")
    lines.append("Data sources")
    for s in r.data_sources:
        lines.append(f"  {s.name} ({s.base_url}), queried {_stamp(s.queried_at)}")
    lines.append("")
    lines.append("Counts")
    for c in r.per_origin_counts:
        extra = f", {c.unresolvable} unresolvable" if c.unresolvable else ""
        note = f" [{c.note}]" if c.note else ""
        lines.append(f"  {c.origin}: {c.retrieved} retrieved{extra}{note}")
    lines.append(f"  duplicates removed: {r.duplicates_removed}")
    lines.append(f"  total unique: {r.total_unique}")
    failures = [c for c in r.per_origin_counts if c.failures]
    if failures or r.outcome in ("partial", "aborted"):
        lines.append("")
        lines.append("Failures")
        for c in failures:
            lines.append(f"  {c.origin}: {c.failures} failure(s){' [' + c.note + ']' if c.note else ''}")
        if not failures:
            lines.append("  (see outcome)")
    if r.caveats:
        lines.append("")
        lines.append("Caveats")
        for caveat in r.caveats:
            lines.append(f"  - {caveat}")
    return "\n".join(lines) + "\n"


def _fmt_value(value) -> str:
    if isinstance(value, list):
        return ", ".join(str(v) for v in value)
    return str(value)
