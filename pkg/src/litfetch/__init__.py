"""litfetch: journal handsearch and citation snowballing for systematic
reviews, against the Crossref and COCI public APIs.

The library surface starts at HandsearchQuery / SnowballQuery plus the two
clients; results come back as deduplicated ResultSets with a
reproducibility SearchReport, exportable as a DOI list, CSV, or RIS.
"""

from .cache import CacheEntry, CacheKey, FileCache
from .coci import CitationEdge, CociClient
from .config import Config, load_config
from .crossref import CrossrefClient, JournalCandidate, PageCursor
from .errors import LitfetchError
from .export import (
    RISRecord,
    ris_parse,
    ris_serialize,
    to_csv,
    to_doi_text,
    to_ris,
)
from .handsearch import HandsearchQuery, estimate_workload, run_handsearch
from .http import ClientPolicy
from .ids import (
    DOI,
    ISSN,
    DateRange,
    KeywordList,
    PartialDate,
    normalize_doi,
    parse_doi_list,
    validate_issn,
)
from .metadata import Author, WorkMetadata
from .report import SearchReport, build_report, render_report
from .resultset import ResultSet, SourceTag, doi_set, filter_by_daterange, merge
from .snowball import SnowballQuery, snowball_backward, snowball_forward

__version__ = "0.1.0"

__all__ = [
    "Author",
    "CacheEntry",
    "CacheKey",
    "CitationEdge",
    "ClientPolicy",
    "CociClient",
    "Config",
    "CrossrefClient",
    "DOI",
    "DateRange",
    "FileCache",
    "HandsearchQuery",
    "ISSN",
    "JournalCandidate",
    "KeywordList",
    "LitfetchError",
    "PageCursor",
    "PartialDate",
    "RISRecord",
    "ResultSet",
    "SearchReport",
    "SnowballQuery",
    "SourceTag",
    "WorkMetadata",
    "build_report",
    "doi_set",
    "estimate_workload",
    "filter_by_daterange",
    "load_config",
    "merge",
    "normalize_doi",
    "parse_doi_list",
    "render_report",
    "ris_parse",
    "ris_serialize",
    "run_handsearch",
    "snowball_backward",
    "snowball_forward",
    "to_csv",
    "to_doi_text",
    "to_ris",
    "validate_issn",
]
