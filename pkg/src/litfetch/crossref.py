"""Client for the Crossref REST API.

Covers everything handsearch and backward citation chasing need: the
journal works listing with server-side publication-date filters and
cursor-based deep paging, single-work hydration, reference extraction,
journal lookup, and RIS content negotiation against the DOI resolver.
"""

from __future__ import annotations

import html
import json
import logging
import re
from dataclasses import dataclass
from typing import Callable

import requests

from .cache import LISTING_TTL, METADATA_TTL, FileCache
from .errors import (
    ContentTypeUnavailable,
    IssnChecksumFailed,
    MalformedDoi,
    MalformedIssn,
    MalformedResponse,
    UnknownJournal,
    WorkNotFound,
)
from .http import ClientPolicy, HttpClient
from .ids import DOI, ISSN, DateRange, KeywordList, PartialDate, normalize_doi, validate_issn
from .metadata import Author, WorkMetadata

logger = logging.getLogger(__name__)

DEFAULT_API_URL = "https://api.crossref.org"
DEFAULT_RESOLVER_URL = "https://doi.org"
RIS_MEDIA_TYPE = "application/x-research-info-systems"

_MARKUP_TAG = re.compile(r"<[^<>]+>")


@dataclass(frozen=True)
class PageCursor:
    """Opaque deep-paging token; "*" requests the first page."""

    token: str = "*"
    exhausted: bool = False


@dataclass(frozen=True)
class JournalCandidate:
    title: str
    issns: tuple[ISSN, ...]


def strip_abstract_markup(raw: str) -> str:
    """Reduce the markup subset in deposited abstracts to plain text."""
    text = _MARKUP_TAG.sub(" ", raw)
    text = html.unescape(text)
    return re.sub(r"\s+", " ", text).strip()


def parse_work_item(item: dict) -> WorkMetadata:
    """Map one Crossref work document onto WorkMetadata.

    Absent abstracts and missing reference DOIs are expected (publishers
    may withhold them) and never an error.
    """
    try:
        doi = normalize_doi(item["DOI"])
    except (KeyError, MalformedDoi) as exc:
        raise MalformedResponse(f"work item without usable DOI: {exc}") from exc

    titles = item.get("title") or []
    title = titles[0] if titles else ""

    authors = []
    for person in item.get("author") or []:
        authors.append(Author(family=person.get("family", "") or "",
                              given=person.get("given", "") or ""))

    containers = item.get("container-title") or []
    container = containers[0] if containers else ""

    issns = []
    for raw_issn in item.get("ISSN") or []:
        try:
            issns.append(validate_issn(raw_issn))
        except (MalformedIssn, IssnChecksumFailed):
            logger.debug("skipping invalid ISSN %r on %s", raw_issn, doi)

    published = None
    for key in ("published", "published-print", "published-online", "issued"):
        block = item.get(key)
        if isinstance(block, dict) and block.get("date-parts"):
            published = PartialDate.from_parts(block["date-parts"])
            if published is not None:
                break

    abstract = item.get("abstract")
    if abstract:
        abstract = strip_abstract_markup(abstract)

    reference_dois: list[DOI] = []
    for ref in item.get("reference") or []:
        raw = ref.get("DOI")
        if not raw:
            continue
        try:
            reference_dois.append(normalize_doi(raw))
        except MalformedDoi:
            logger.debug("skipping malformed reference DOI %r on %s", raw, doi)

    return WorkMetadata(
        doi=doi,
        title=title,
        authors=authors,
        container_title=container,
        publisher=item.get("publisher", "") or "",
        issn_list=issns,
        published=published,
        abstract=abstract or None,
        subject_keywords=list(item.get("subject") or []),
        url=item.get("URL"),
        reference_dois=reference_dois,
        reference_count_declared=int(item.get("reference-count") or 0),
    )


class CrossrefClient:
    """One shared instance may serve concurrent tasks; request admission
    is serialized by the underlying rate gate."""

    source_name = "Crossref"

    def __init__(
        self,
        base_url: str = DEFAULT_API_URL,
        resolver_url: str = DEFAULT_RESOLVER_URL,
        policy: ClientPolicy | None = None,
        cache: FileCache | None = None,
        session: requests.Session | None = None,
        cache_only: bool = False,
    ):
        policy = policy or ClientPolicy()
        self.policy = policy
        self.http = HttpClient(base_url, policy, cache=cache, session=session,
                               cache_only=cache_only)
        self.resolver = HttpClient(resolver_url, policy, cache=cache,
                                   session=session, cache_only=cache_only)

    @property
    def base_url(self) -> str:
        return self.http.base_url

    def _params(self, extra: dict | None = None) -> dict:
        params = dict(extra or {})
        if self.policy.contact_email:
            params["mailto"] = self.policy.contact_email
        return params

    def _message(self, response) -> dict:
        try:
            document = json.loads(response.body.decode("utf-8"))
            message = document["message"]
        except (ValueError, KeyError, UnicodeDecodeError) as exc:
            raise MalformedResponse(f"cannot parse response from {response.url}: {exc}") from exc
        if not isinstance(message, dict):
            raise MalformedResponse(f"unexpected message shape from {response.url}")
        return message

    # --- journal works listing -------------------------------------------

    def fetch_journal_works_page(
        self,
        issn: ISSN,
        range: DateRange,
        keywords: KeywordList,
        cursor: PageCursor,
        select: list[str] | None = None,
    ) -> tuple[list[WorkMetadata], PageCursor, int]:
        """One page of the journal's works listing, filtered server-side.

        Returns (works, next cursor, upstream total-results). The filter
        uses the publication-date family with inclusive bounds; keywords,
        when present, become one space-joined bibliographic query.
        """
        if cursor.exhausted:
            raise ValueError("cursor is exhausted")
        rows = self.policy.max_page_size
        params = {
            "filter": (f"from-pub-date:{range.start.isoformat()},"
                       f"until-pub-date:{range.end.isoformat()}"),
            "rows": rows,
            "cursor": cursor.token,
        }
        if keywords:
            params["query.bibliographic"] = " ".join(keywords)
        if select:
            params["select"] = ",".join(select)
        response = self.http.get(
            f"journals/{issn.value}/works",
            params=self._params(params),
            cache_ttl=LISTING_TTL,
        )
        if response.status == 404:
            raise UnknownJournal(f"no journal with ISSN {issn}", origin=issn.value)
        if response.status >= 400:
            raise MalformedResponse(
                f"unexpected status {response.status} from {response.url}")
        message = self._message(response)
        items = message.get("items")
        if not isinstance(items, list):
            raise MalformedResponse(f"listing without items array from {response.url}")
        works = [parse_work_item(item) for item in items]
        total = int(message.get("total-results") or 0)
        next_token = message.get("next-cursor") or ""
        next_cursor = PageCursor(token=next_token, exhausted=len(items) < rows)
        return works, next_cursor, total

    def fetch_all_journal_works(
        self,
        issn: ISSN,
        range: DateRange,
        keywords: KeywordList | None = None,
        select: list[str] | None = None,
        on_progress: Callable[[int, int], None] | None = None,
        on_page: Callable[[PageCursor], None] | None = None,
        start_cursor: PageCursor | None = None,
    ) -> list[WorkMetadata]:
        """Drain the listing cursor to exhaustion.

        Result is the page concatenation with intra-journal DOI dedup
        (first occurrence wins). ``on_progress(fetched, declared)`` fires
        after every page; ``on_page(next_cursor)`` lets callers persist
        paging state. Page errors are re-raised annotated with the page
        index and carry the partial result list for resumability.
        """
        keywords = keywords or KeywordList()
        works: list[WorkMetadata] = []
        seen: set[str] = set()
        cursor = start_cursor or PageCursor()
        page_index = 0
        while not cursor.exhausted:
            try:
                page, cursor, total = self.fetch_journal_works_page(
                    issn, range, keywords, cursor, select=select)
            except Exception as exc:
                if hasattr(exc, "annotate"):
                    exc.annotate(origin=issn.value, page=page_index)
                    exc.partial = works
                raise
            for work in page:
                if work.doi.value not in seen:
                    seen.add(work.doi.value)
                    works.append(work)
            if on_page is not None:
                on_page(cursor)
            if on_progress is not None:
                on_progress(len(works), total)
            page_index += 1
        return works

    def total_journal_works(self, issn: ISSN, range: DateRange,
                            keywords: KeywordList | None = None) -> int:
        """Upstream total-results for the filtered listing; fetches no works."""
        keywords = keywords or KeywordList()
        params = {
            "filter": (f"from-pub-date:{range.start.isoformat()},"
                       f"until-pub-date:{range.end.isoformat()}"),
            "rows": 0,
        }
        if keywords:
            params["query.bibliographic"] = " ".join(keywords)
        response = self.http.get(
            f"journals/{issn.value}/works",
            params=self._params(params),
            cache_ttl=LISTING_TTL,
        )
        if response.status == 404:
            raise UnknownJournal(f"no journal with ISSN {issn}", origin=issn.value)
        if response.status >= 400:
            raise MalformedResponse(
                f"unexpected status {response.status} from {response.url}")
        return int(self._message(response).get("total-results") or 0)

    # --- single works -----------------------------------------------------

    def fetch_work(self, doi: DOI) -> WorkMetadata:
        """Hydrate one DOI to full metadata. Absent abstract is not an error."""
        response = self.http.get(
            f"works/{self.http.quote_path_segment(doi.value)}",
            params=self._params(),
            cache_ttl=METADATA_TTL,
        )
        if response.status == 404:
            raise WorkNotFound(f"no work registered for {doi}", origin=doi.value)
        if response.status >= 400:
            raise MalformedResponse(
                f"unexpected status {response.status} from {response.url}")
        return parse_work_item(self._message(response))

    def fetch_references(self, doi: DOI) -> tuple[list[DOI], int]:
        """Reference DOIs deposited for a work, plus the unresolvable count.

        Only references carrying a DOI are returned (normalized, deduped).
        References without DOIs count as unresolvable; a work whose
        publisher withheld its reference list entirely shows up as
        ([], declared-count).
        """
        work = self.fetch_work(doi)
        resolvable = len(work.reference_dois)
        unresolvable = max(work.reference_count_declared - resolvable, 0)
        return work.reference_dois, unresolvable

    # --- journal lookup -----------------------------------------------------

    def lookup_journal(self, name_or_issn: str) -> list[JournalCandidate]:
        """Resolve a journal query to candidates; never auto-selects.

        An input that validates as an ISSN is looked up directly and
        yields at most one record. Anything else runs a title search and
        returns the candidates in upstream relevance order for a human to
        disambiguate.
        """
        query = name_or_issn.strip()
        if not query:
            raise ValueError("empty journal query")
        try:
            issn = validate_issn(query)
        except (MalformedIssn, IssnChecksumFailed):
            issn = None

        if issn is not None:
            response = self.http.get(
                f"journals/{issn.value}", params=self._params(), cache_ttl=LISTING_TTL)
            if response.status == 404:
                raise UnknownJournal(f"no journal with ISSN {issn}", origin=issn.value)
            if response.status >= 400:
                raise MalformedResponse(
                    f"unexpected status {response.status} from {response.url}")
            return [self._journal_candidate(self._message(response))]

        response = self.http.get(
            "journals", params=self._params({"query": query, "rows": 20}),
            cache_ttl=LISTING_TTL)
        if response.status >= 400:
            raise MalformedResponse(
                f"unexpected status {response.status} from {response.url}")
        items = self._message(response).get("items") or []
        return [self._journal_candidate(item) for item in items]

    @staticmethod
    def _journal_candidate(item: dict) -> JournalCandidate:
        issns = []
        for raw in item.get("ISSN") or []:
            try:
                issns.append(validate_issn(raw))
            except (MalformedIssn, IssnChecksumFailed):
                continue
        return JournalCandidate(title=item.get("title", "") or "", issns=tuple(issns))

    # --- content negotiation -------------------------------------------------

    def negotiate_ris(self, doi: DOI) -> str:
        """Ask the DOI resolver for an RIS rendition; body returned verbatim."""
        response = self.resolver.get(
            self.resolver.quote_path_segment(doi.value),
            accept=RIS_MEDIA_TYPE,
            cache_ttl=METADATA_TTL,
        )
        if response.redirects:
            logger.debug("resolver reached %s via %d hop(s)", doi, response.redirects)
        if response.status == 404:
            raise WorkNotFound(f"resolver has no record for {doi}", origin=doi.value)
        if response.status == 406:
            raise ContentTypeUnavailable(
                f"resolver cannot produce {RIS_MEDIA_TYPE} for {doi}", origin=doi.value)
        if response.status >= 400:
            raise MalformedResponse(
                f"unexpected status {response.status} from {response.url}")
        return response.body.decode("utf-8")
