"""Client for the COCI REST API (OpenCitations DOI-to-DOI citations).

Forward citation chasing only: given a DOI, list the works citing it.
COCI cannot distinguish an unknown DOI from an uncited one, so an empty
edge list is always a valid answer, never an error.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass

import requests

from .cache import LISTING_TTL, FileCache
from .errors import MalformedDoi, MalformedResponse
from .http import ClientPolicy, HttpClient
from .ids import DOI, PartialDate, normalize_doi

logger = logging.getLogger(__name__)

DEFAULT_COCI_URL = "https://opencitations.net/index/coci/api/v1"


@dataclass(frozen=True)
class CitationEdge:
    """One open citation: ``citing`` cites ``cited``."""

    citing: DOI
    cited: DOI
    creation_date: PartialDate | None = None

    def __post_init__(self):
        if self.citing == self.cited:
            raise ValueError(f"self-citation edge for {self.citing}")


def _parse_creation(raw: str | None) -> PartialDate | None:
    if not raw:
        return None
    match = re.match(r"^(\d{4})(?:-(\d{2}))?(?:-(\d{2}))?$", raw.strip())
    if not match:
        return None
    year, month, day = match.groups()
    return PartialDate(int(year),
                       int(month) if month else None,
                       int(day) if day else None)


class CociClient:
    """Shared-instance client; request admission serialized as in the
    Crossref client but with its own, separately configured policy."""

    source_name = "COCI"

    def __init__(
        self,
        base_url: str = DEFAULT_COCI_URL,
        policy: ClientPolicy | None = None,
        cache: FileCache | None = None,
        session: requests.Session | None = None,
        cache_only: bool = False,
    ):
        self.policy = policy or ClientPolicy()
        self.http = HttpClient(base_url, self.policy, cache=cache, session=session,
                               cache_only=cache_only)

    @property
    def base_url(self) -> str:
        return self.http.base_url

    def fetch_citing(self, doi: DOI) -> list[CitationEdge]:
        """All edges whose cited side is the given DOI, deduplicated.

        An unindexed DOI yields [] (indistinguishable upstream from an
        uncited one).
        """
        response = self.http.get(
            f"citations/{self.http.quote_path_segment(doi.value)}",
            cache_ttl=LISTING_TTL,
        )
        if response.status >= 400:
            raise MalformedResponse(
                f"unexpected status {response.status} from {response.url}")
        try:
            rows = json.loads(response.body.decode("utf-8"))
        except (ValueError, UnicodeDecodeError) as exc:
            raise MalformedResponse(f"cannot parse response from {response.url}: {exc}") from exc
        if rows is None:
            return []
        if not isinstance(rows, list):
            raise MalformedResponse(f"expected a JSON array from {response.url}")

        edges: list[CitationEdge] = []
        seen: set[tuple[str, str]] = set()
        for row in rows:
            try:
                citing = normalize_doi(row["citing"])
                cited = normalize_doi(row["cited"])
            except (KeyError, MalformedDoi, TypeError) as exc:
                raise MalformedResponse(f"bad citation row from {response.url}: {exc}") from exc
            if cited != doi:
                raise MalformedResponse(
                    f"citation row for {cited} in response for {doi}")
            if citing == cited:
                logger.debug("dropping self-citation row for %s", doi)
                continue
            pair = (citing.value, cited.value)
            if pair in seen:
                continue
            seen.add(pair)
            edges.append(CitationEdge(citing=citing, cited=cited,
                                      creation_date=_parse_creation(row.get("creation"))))
        return edges
