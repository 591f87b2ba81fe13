"""Shared HTTP machinery for the API clients.

One place owns request etiquette: a minimum interval between requests on
the same client (a single gate serializing admission across threads),
exponential backoff with jitter on transient failures, honoring upstream
rate-limit headers, and transparent read-through response caching.
"""

from __future__ import annotations

import logging
import random
import threading
import time
from dataclasses import dataclass
from urllib.parse import quote, urlencode

import requests

from .cache import CacheKey, FileCache
from .errors import NetworkError, RateLimited, UpstreamError
from .report import TOOL_VERSION

logger = logging.getLogger(__name__)


@dataclass
class ClientPolicy:
    """Request etiquette for one upstream host.

    ``max_backoff`` caps the doubling retry backoff and is also the
    longest server-instructed wait we will honor before surfacing
    RateLimited to the caller. Anonymous clients default to a slower
    request rate than clients that identify themselves.
    """

    contact_email: str | None = None
    max_page_size: int = 100
    max_retries: int = 3
    initial_backoff: float = 1.0
    max_backoff: float = 60.0
    request_timeout: float = 30.0
    min_request_interval: float | None = None

    def __post_init__(self):
        if not 1 <= self.max_page_size <= 1000:
            raise ValueError("max_page_size must be in [1, 1000]")
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")
        if self.min_request_interval is None:
            self.min_request_interval = 0.1 if self.contact_email else 0.5
        if self.min_request_interval <= 0:
            raise ValueError("min_request_interval must be positive")

    def user_agent(self) -> str:
        agent = f"litfetch/{TOOL_VERSION}"
        if self.contact_email:
            agent += f" (mailto:{self.contact_email})"
        return agent


class RateGate:
    """Serializes request admission; one per client instance."""

    def __init__(self, interval: float):
        self.interval = interval
        self._lock = threading.Lock()
        self._last = 0.0

    def wait(self) -> None:
        # Hold the lock through the sleep: concurrent callers are admitted
        # strictly one interval apart.
        with self._lock:
            now = time.monotonic()
            due = self._last + self.interval
            if now < due:
                time.sleep(due - now)
            self._last = time.monotonic()


@dataclass
class HttpResponse:
    status: int
    body: bytes
    url: str
    from_cache: bool = False
    redirects: int = 0


class HttpClient:
    """Rate-limited, retrying GET client with read-through caching.

    Only idempotent GETs are issued, so every transient failure (network
    error or 5xx) is safe to retry. 4xx responses are returned to the
    caller unretried for domain-specific mapping. When a cache is
    configured, fresh entries are served without touching the network;
    ``cache_only`` disables the network entirely (fixture replay mode).
    """

    def __init__(
        self,
        base_url: str,
        policy: ClientPolicy | None = None,
        cache: FileCache | None = None,
        session: requests.Session | None = None,
        cache_only: bool = False,
    ):
        self.base_url = base_url.rstrip("/")
        self.policy = policy or ClientPolicy()
        self.cache = cache
        self.cache_only = cache_only
        self.session = session or requests.Session()
        self.session.headers["User-Agent"] = self.policy.user_agent()
        self.gate = RateGate(self.policy.min_request_interval)

    def build_url(self, path: str, params: dict | None = None) -> str:
        url = f"{self.base_url}/{path.lstrip('/')}"
        if params:
            url += "?" + urlencode(sorted(params.items()))
        return url

    @staticmethod
    def quote_path_segment(segment: str) -> str:
        return quote(segment, safe="")

    def get(
        self,
        path: str,
        params: dict | None = None,
        accept: str = "application/json",
        cache_ttl: float | None = None,
        use_cache: bool = True,
    ) -> HttpResponse:
        url = self.build_url(path, params)
        key = CacheKey.for_request("GET", url, accept)

        if self.cache is not None and use_cache:
            entry = self.cache.get(key, ttl=cache_ttl)
            if entry is not None:
                return HttpResponse(entry.status, entry.body, url, from_cache=True)
        if self.cache_only:
            raise NetworkError(f"cache-only mode and no cached response for {url}")

        response = self._get_with_retries(url, accept)
        if self.cache is not None and use_cache and 200 <= response.status < 300:
            self.cache.put(key, response.body, response.status)
        return response

    def _get_with_retries(self, url: str, accept: str) -> HttpResponse:
        attempts = self.policy.max_retries + 1
        last_error: Exception | None = None
        for attempt in range(attempts):
            if attempt:
                self._backoff(attempt)
            self.gate.wait()
            try:
                resp = self.session.get(
                    url,
                    headers={"Accept": accept},
                    timeout=self.policy.request_timeout,
                )
            except requests.RequestException as exc:
                last_error = exc
                logger.debug("request failed (%s), attempt %d/%d", exc, attempt + 1, attempts)
                continue

            if resp.status_code == 429:
                wait = _retry_after_seconds(resp.headers.get("Retry-After"))
                if wait is not None and wait > self.policy.max_backoff:
                    raise RateLimited(
                        f"server asked to wait {wait:.0f}s for {url}", wait_seconds=wait
                    )
                if wait:
                    time.sleep(wait)
                last_error = UpstreamError(f"rate limited at {url}", status=429)
                continue
            if resp.status_code >= 500:
                last_error = UpstreamError(
                    f"upstream {resp.status_code} at {url}", status=resp.status_code
                )
                logger.debug("upstream %d, attempt %d/%d", resp.status_code, attempt + 1, attempts)
                continue
            if resp.history:
                logger.debug("%s reached via %d redirect hop(s)", url, len(resp.history))
            return HttpResponse(resp.status_code, resp.content, url,
                                redirects=len(resp.history))

        if isinstance(last_error, UpstreamError):
            raise last_error
        raise NetworkError(f"request to {url} failed after {attempts} attempts: {last_error}")

    def _backoff(self, attempt: int) -> None:
        base = min(self.policy.initial_backoff * 2 ** (attempt - 1), self.policy.max_backoff)
        time.sleep(random.uniform(base / 2, base))


def _retry_after_seconds(header: str | None) -> float | None:
    if not header:
        return None
    try:
        return max(0.0, float(header))
    except ValueError:
        return None  # HTTP-date form: rare upstream, treat as unspecified
