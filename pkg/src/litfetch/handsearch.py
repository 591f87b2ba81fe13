"""Handsearch orchestration: every work from a list of journals in a range.

For each journal ISSN the full filtered works listing is drained, then the
per-journal result sets are merged left-to-right in input order into one
deduplicated dataset with a reproducibility report. A failing journal
aborts the whole search by default: a silently incomplete handsearch is
worse than none for a systematic review.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .cache import LISTING_TTL, FileCache
from .crossref import CrossrefClient, PageCursor
from .errors import InvalidQuery
from .ids import ISSN, DateRange, KeywordList
from .report import (
    Clock,
    DataSource,
    OriginCount,
    SearchReport,
    build_report,
    report_from_jsonable,
    report_to_jsonable,
    utc_now,
)
from .resultset import ResultSet, SourceTag, merge

logger = logging.getLogger(__name__)

ProgressFn = Callable[[str, int, int], None]


def _stable_query_id(canonical: dict) -> str:
    digest = hashlib.sha256(
        json.dumps(canonical, sort_keys=True, separators=(",", ":")).encode("utf-8")
    ).hexdigest()
    return digest[:16]


@dataclass(frozen=True)
class HandsearchQuery:
    """A complete, serializable handsearch specification.

    Three inputs: the journals (required), the date range (required), and
    optional keywords. The query id is a stable hash of the canonical
    form, identical across runs and platforms.
    """

    journals: tuple[ISSN, ...]
    range: DateRange
    keywords: KeywordList = field(default_factory=KeywordList)
    requested_fields: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.journals:
            raise InvalidQuery("handsearch requires at least one journal ISSN")
        values = [issn.value for issn in self.journals]
        if len(set(values)) != len(values):
            raise InvalidQuery("duplicate journal ISSNs in query")

    def canonical(self) -> dict:
        return {
            "type": "handsearch",
            "journals": sorted(issn.value for issn in self.journals),
            "from": self.range.start.isoformat(),
            "until": self.range.end.isoformat(),
            "keywords": list(self.keywords.terms),
        }

    @property
    def query_id(self) -> str:
        return _stable_query_id(self.canonical())

    def report_query(self) -> dict:
        # methodology disclosures ride along without affecting the query id
        return {
            "query_id": self.query_id,
            **self.canonical(),
            "date_filter": "publication date (from-pub-date/until-pub-date, inclusive)",
            "result_order": "first retrieval, journals in input order",
        }


def estimate_workload(q: HandsearchQuery, client: CrossrefClient) -> dict[str, int]:
    """Per-journal declared totals via one lightweight request each."""
    return {
        issn.value: client.total_journal_works(issn, q.range, q.keywords)
        for issn in q.journals
    }


def run_handsearch(
    q: HandsearchQuery,
    client: CrossrefClient,
    *,
    continue_on_error: bool = False,
    parallelism: int = 1,
    cache: FileCache | None = None,
    resume: bool = True,
    clock: Clock | None = None,
    on_progress: ProgressFn | None = None,
    query_extras: dict | None = None,
) -> tuple[ResultSet, SearchReport]:
    """Fetch all journals, merge, and report.

    Journals may be fetched concurrently (``parallelism`` > 1); the merge
    always runs over completed journals in input order, so membership and
    ordering are deterministic. With a cache attached, completed runs are
    stored and interrupted ones resume without re-fetching drained pages.
    """
    clock = clock or utc_now
    query_id = q.query_id

    if cache is not None and resume:
        stored = _load_completed(cache, query_id)
        if stored is not None:
            logger.info("query %s already completed; returning cached results", query_id)
            return stored

    progress_lock = threading.Lock()

    def record_page(origin: str, cursor: PageCursor) -> None:
        if cache is None:
            return
        with progress_lock:
            cache.record_progress(query_id, origin, cursor)

    def fetch_one(issn: ISSN):
        def on_page(cursor: PageCursor) -> None:
            record_page(issn.value, cursor)

        def progress(fetched: int, declared: int) -> None:
            if on_progress is not None:
                on_progress(issn.value, fetched, declared)

        return client.fetch_all_journal_works(
            issn, q.range, q.keywords,
            select=list(q.requested_fields) or None,
            on_progress=progress, on_page=on_page,
        )

    outcomes: dict[str, object] = {}
    if parallelism > 1 and len(q.journals) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            futures = {issn.value: pool.submit(fetch_one, issn) for issn in q.journals}
        for value, future in futures.items():
            try:
                outcomes[value] = future.result()
            except Exception as exc:  # inspected in input order below
                outcomes[value] = exc
    else:
        for issn in q.journals:
            try:
                outcomes[issn.value] = fetch_one(issn)
            except Exception as exc:
                outcomes[issn.value] = exc
                if not continue_on_error:
                    break

    per_origin: list[OriginCount] = []
    merged = ResultSet(created_at=clock())
    failures = 0
    for issn in q.journals:
        outcome = outcomes.get(issn.value)
        if outcome is None or isinstance(outcome, Exception):
            if outcome is None:
                continue  # aborted before reaching this journal
            if not continue_on_error:
                raise outcome
            failures += 1
            logger.warning("journal %s failed: %s", issn.value, outcome)
            per_origin.append(OriginCount(issn.value, retrieved=0, failures=1,
                                          note=str(outcome)))
            continue
        works = outcome
        tag = SourceTag(kind="handsearch", origin=issn.value, query_id=query_id)
        journal_set = ResultSet.build(works, tag, created_at=merged.created_at)
        per_origin.append(OriginCount(issn.value, retrieved=len(journal_set)))
        merged = merge(merged, journal_set)

    outcome_label = "partial" if failures else "success"
    caveats = []
    if failures:
        caveats.append("continue-on-error was enabled; failed journals are "
                       "listed with zero retrieved works")
    rep = build_report(
        query={**q.report_query(), **(query_extras or {})},
        per_origin=per_origin,
        data_sources=[DataSource(client.source_name, client.base_url, clock())],
        total_unique=len(merged),
        outcome=outcome_label,
        caveats=caveats,
        clock=clock,
    )

    if cache is not None and outcome_label == "success":
        _store_completed(cache, query_id, merged, rep)
        cache.clear_progress(query_id)
    return merged, rep


def _store_completed(cache: FileCache, query_id: str, rs: ResultSet,
                     rep: SearchReport) -> None:
    cache.store_resultset(query_id, {
        "resultset": rs.to_jsonable(),
        "report": report_to_jsonable(rep),
    })


def _load_completed(cache: FileCache, query_id: str):
    stored = cache.load_resultset(query_id)
    if not stored:
        return None
    rs = ResultSet.from_jsonable(stored["resultset"])
    age = dt.datetime.now(dt.timezone.utc) - rs.created_at
    if age.total_seconds() > LISTING_TTL:
        return None  # listings grow; a week-old completed run is stale
    return rs, report_from_jsonable(stored["report"])
