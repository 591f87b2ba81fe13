"""Exception hierarchy for litfetch.

Identifier errors carry the offending input; client errors carry enough
context (origin journal, page index) to tell the caller which part of a
multi-journal or multi-seed search failed.
"""

from __future__ import annotations


class LitfetchError(Exception):
    """Base class for all litfetch errors."""


# --- identifier / input errors -------------------------------------------

class MalformedDoi(LitfetchError):
    def __init__(self, token: str, position: int | None = None):
        self.token = token
        self.position = position
        where = f" (token {position})" if position is not None else ""
        super().__init__(f"malformed DOI{where}: {token!r}")


class MalformedIssn(LitfetchError):
    def __init__(self, raw: str):
        self.raw = raw
        super().__init__(f"malformed ISSN: {raw!r}")


class IssnChecksumFailed(LitfetchError):
    def __init__(self, raw: str):
        self.raw = raw
        super().__init__(f"ISSN check digit does not verify: {raw!r}")


class InvalidDateRange(LitfetchError):
    pass


class InvalidKeyword(LitfetchError):
    pass


class InvalidQuery(LitfetchError):
    pass


# --- HTTP client errors ---------------------------------------------------

class ClientError(LitfetchError):
    """Base for errors raised while talking to an upstream API.

    ``origin`` is the journal ISSN or seed DOI being processed when the
    error occurred; ``page`` is the zero-based page index for paged
    listings. Both are filled in by the orchestration layer.
    """

    def __init__(self, message: str, origin: str | None = None, page: int | None = None):
        self.origin = origin
        self.page = page
        self.partial = None  # partial results attached by pagination loops
        super().__init__(message)

    def annotate(self, origin: str | None = None, page: int | None = None) -> "ClientError":
        if origin is not None:
            self.origin = origin
        if page is not None:
            self.page = page
        return self


class NetworkError(ClientError):
    pass


class RateLimited(ClientError):
    def __init__(self, message: str, wait_seconds: float | None = None, **kw):
        super().__init__(message, **kw)
        self.wait_seconds = wait_seconds


class UpstreamError(ClientError):
    def __init__(self, message: str, status: int | None = None, **kw):
        super().__init__(message, **kw)
        self.status = status


class UnknownJournal(ClientError):
    pass


class WorkNotFound(ClientError):
    pass


class ContentTypeUnavailable(ClientError):
    pass


class MalformedResponse(ClientError):
    pass


# --- export / RIS errors --------------------------------------------------

class InvalidRecord(LitfetchError):
    pass


class ParseError(LitfetchError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


# --- report / storage errors ----------------------------------------------

class InconsistentCounts(LitfetchError):
    pass


class StorageError(LitfetchError):
    pass
