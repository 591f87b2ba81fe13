"""Citation chasing from a seed DOI list, one hop in either direction.

Backward chasing reads each seed's deposited reference list from
Crossref; forward chasing asks COCI which works cite each seed. Either
way the result is the union of the retrieved DOIs, minus the seeds
themselves (reviewers already have those), optionally hydrated to full
metadata. Iterated snowballing is just feeding an output back in as the
next seed list.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

from .coci import CociClient
from .crossref import CrossrefClient
from .errors import InvalidQuery, WorkNotFound
from .ids import DOI
from .metadata import WorkMetadata
from .report import (
    Clock,
    DataSource,
    OriginCount,
    SearchReport,
    build_report,
    utc_now,
)
from .resultset import ResultSet, SourceTag, merge
from .handsearch import _stable_query_id

logger = logging.getLogger(__name__)

DIRECTIONS = ("forward", "backward")


@dataclass(frozen=True)
class SnowballQuery:
    """A complete, serializable snowballing specification."""

    seeds: tuple[DOI, ...]
    direction: str
    hydrate: bool = True

    def __post_init__(self):
        if not self.seeds:
            raise InvalidQuery("snowballing requires at least one seed DOI")
        values = [d.value for d in self.seeds]
        if len(set(values)) != len(values):
            raise InvalidQuery("duplicate seed DOIs in query")
        if self.direction not in DIRECTIONS:
            raise InvalidQuery(
                f"direction must be one of {DIRECTIONS}, got {self.direction!r}")

    def canonical(self) -> dict:
        return {
            "type": "snowball",
            "direction": self.direction,
            "seeds": sorted(d.value for d in self.seeds),
            "hydrate": self.hydrate,
        }

    @property
    def query_id(self) -> str:
        return _stable_query_id(self.canonical())

    def report_query(self) -> dict:
        return {
            "query_id": self.query_id,
            **self.canonical(),
            "result_order": "seed input order, then retrieval order",
        }


def snowball_backward(
    q: SnowballQuery,
    client: CrossrefClient,
    *,
    continue_on_error: bool = False,
    clock: Clock | None = None,
    on_progress: Callable[[str, int, int], None] | None = None,
    query_extras: dict | None = None,
) -> tuple[ResultSet, SearchReport]:
    """Union of the DOIs each seed cites, per its Crossref reference list.

    A seed that is itself unknown to Crossref aborts by default (or is
    recorded as a failure with continue-on-error). Publishers that
    withhold reference lists yield zero DOIs with the declared count
    reported as unresolvable, never an error.
    """
    if q.direction != "backward":
        raise InvalidQuery("snowball_backward requires direction=backward")
    clock = clock or utc_now
    query_id = q.query_id
    seed_values = {d.value for d in q.seeds}

    merged = ResultSet(created_at=clock())
    per_origin: list[OriginCount] = []
    failures = 0
    for index, seed in enumerate(q.seeds):
        try:
            refs, unresolvable = client.fetch_references(seed)
        except WorkNotFound as exc:
            if not continue_on_error:
                raise exc.annotate(origin=seed.value)
            failures += 1
            per_origin.append(OriginCount(seed.value, retrieved=0, failures=1,
                                          unresolvable=0, note=str(exc)))
            continue
        found = [d for d in refs if d.value not in seed_values]
        excluded = len(refs) - len(found)
        tag = SourceTag(kind="snowball-backward", origin=seed.value, query_id=query_id)
        seed_set = ResultSet.build([WorkMetadata.stub(d) for d in found], tag,
                                   created_at=merged.created_at)
        note = f"{excluded} seed DOI(s) excluded from results" if excluded else ""
        per_origin.append(OriginCount(seed.value, retrieved=len(seed_set),
                                      unresolvable=unresolvable, note=note))
        merged = merge(merged, seed_set)
        if on_progress is not None:
            on_progress(seed.value, index + 1, len(q.seeds))

    caveats = []
    if failures:
        caveats.append("continue-on-error was enabled; failed seeds are "
                       "listed with zero retrieved works")
    if q.hydrate:
        caveats.extend(_hydrate(merged, client))

    rep = build_report(
        query={**q.report_query(), **(query_extras or {})},
        per_origin=per_origin,
        data_sources=[DataSource(client.source_name, client.base_url, clock())],
        total_unique=len(merged),
        outcome="partial" if failures else "success",
        caveats=caveats,
        clock=clock,
    )
    return merged, rep


def snowball_forward(
    q: SnowballQuery,
    coci: CociClient,
    crossref: CrossrefClient | None = None,
    *,
    clock: Clock | None = None,
    on_progress: Callable[[str, int, int], None] | None = None,
    query_extras: dict | None = None,
) -> tuple[ResultSet, SearchReport]:
    """Union of the DOIs citing each seed, per the COCI citation index.

    COCI cannot distinguish unknown seeds from uncited ones, so a seed
    with zero citers is flagged in the report rather than treated as an
    error. Hydration (when requested) goes through Crossref.
    """
    if q.direction != "forward":
        raise InvalidQuery("snowball_forward requires direction=forward")
    if q.hydrate and crossref is None:
        raise ValueError("hydration requires a Crossref client")
    clock = clock or utc_now
    query_id = q.query_id
    seed_values = {d.value for d in q.seeds}

    merged = ResultSet(created_at=clock())
    per_origin: list[OriginCount] = []
    for index, seed in enumerate(q.seeds):
        edges = coci.fetch_citing(seed)
        found = [e.citing for e in edges if e.citing.value not in seed_values]
        excluded = len(edges) - len(found)
        tag = SourceTag(kind="snowball-forward", origin=seed.value, query_id=query_id)
        seed_set = ResultSet.build([WorkMetadata.stub(d) for d in found], tag,
                                   created_at=merged.created_at)
        notes = []
        if not edges:
            notes.append("no citations found")
        if excluded:
            notes.append(f"{excluded} seed DOI(s) excluded from results")
        per_origin.append(OriginCount(seed.value, retrieved=len(seed_set),
                                      note="; ".join(notes)))
        merged = merge(merged, seed_set)
        if on_progress is not None:
            on_progress(seed.value, index + 1, len(q.seeds))

    caveats = []
    if q.hydrate:
        caveats.extend(_hydrate(merged, crossref))

    sources = [DataSource(coci.source_name, coci.base_url, clock())]
    if q.hydrate:
        sources.append(DataSource(crossref.source_name, crossref.base_url, clock()))
    rep = build_report(
        query={**q.report_query(), **(query_extras or {})},
        per_origin=per_origin,
        data_sources=sources,
        total_unique=len(merged),
        outcome="success",
        caveats=caveats,
        clock=clock,
    )
    return merged, rep


def _hydrate(rs: ResultSet, client: CrossrefClient) -> list[str]:
    """Resolve stub entries to full metadata in place.

    Membership never changes; hydration failures downgrade to DOI-only
    entries and are summarized for the report.
    """
    failed = 0
    for entry in rs.entries:
        try:
            entry.work = client.fetch_work(entry.work.doi)
        except WorkNotFound:
            failed += 1
            logger.info("cannot hydrate %s; keeping DOI-only entry", entry.work.doi)
    if failed:
        return [f"{failed} of {len(rs.entries)} found works could not be "
                f"hydrated to full metadata"]
    return []
