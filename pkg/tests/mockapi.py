"""Scripted mock of the three upstream APIs (works listing + single works,
citations, RIS resolver), shared by every network-facing test.

One MockApi instance owns a corpus, a request log with monotonic
timestamps, and failure scripting. It can be driven two ways:

* mounted into a requests.Session as a transport adapter (no sockets,
  fast enough for property tests), or
* served over a real loopback HTTP server (for CLI / service end-to-end
  tests and anything that needs a separate process to reach it).
"""

from __future__ import annotations

import base64
import io
import json
import random
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, unquote, urlsplit

import requests
from requests.adapters import BaseAdapter

CROSSREF_HOST = "http://crossref.test"
COCI_HOST = "http://coci.test"
RESOLVER_HOST = "http://resolver.test"


# --- corpus -----------------------------------------------------------------


def issn_with_checksum(body7: str) -> str:
    """Append the mod-11 check digit to a 7-digit ISSN body."""
    total = sum(int(c) * (8 - i) for i, c in enumerate(body7))
    check = (11 - total % 11) % 11
    return f"{body7[:4]}-{body7[4:]}{'X' if check == 10 else str(check)}"


def make_work(
    doi: str,
    title: str = "",
    authors: list[tuple[str, str]] | None = None,
    container: str = "",
    publisher: str = "",
    issn: str | None = None,
    published: tuple | None = (2020, 1, 1),
    abstract: str | None = None,
    subjects: list[str] | None = None,
    url: str | None = None,
    references: list[str] | None = None,
    unresolvable_refs: int = 0,
    reference_count: int | None = None,
) -> dict:
    """One Crossref-shaped work item for the mock corpus."""
    item = {
        "DOI": doi,
        "title": [title] if title else [],
        "author": [{"family": f, "given": g} for f, g in (authors or [])],
        "container-title": [container] if container else [],
        "publisher": publisher,
        "URL": url or f"https://doi.org/{doi}",
    }
    if issn:
        item["ISSN"] = [issn]
    if published:
        item["published"] = {"date-parts": [list(published)]}
    if abstract is not None:
        item["abstract"] = abstract
    if subjects:
        item["subject"] = list(subjects)
    refs = [{"key": f"ref{i}", "DOI": ref} for i, ref in enumerate(references or [])]
    refs += [{"key": f"noref{i}", "unstructured": "citation without DOI"}
             for i in range(unresolvable_refs)]
    if refs:
        item["reference"] = refs
    declared = reference_count if reference_count is not None else len(refs)
    item["reference-count"] = declared
    return item


@dataclass
class LoggedRequest:
    t: float
    method: str
    path: str
    query: dict
    accept: str


@dataclass
class FailRule:
    substring: str
    times: int | None  # None = permanent
    status: int = 500
    retry_after: str | None = None


@dataclass
class MockApi:
    journals: dict = field(default_factory=dict)   # issn -> {"title": str, "works": [item]}
    works: dict = field(default_factory=dict)      # doi -> item
    coci_rows: dict = field(default_factory=dict)  # cited doi -> [row]
    ris_bodies: dict = field(default_factory=dict)  # doi -> str
    ris_unavailable: set = field(default_factory=set)  # dois answering 406
    redirect_hops: dict = field(default_factory=dict)  # doi -> n hops before RIS
    delay_rules: dict = field(default_factory=dict)    # path substring -> seconds
    log: list = field(default_factory=list)
    fail_rules: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    # --- corpus construction -------------------------------------------

    def add_journal(self, issn: str, title: str = "") -> None:
        self.journals.setdefault(issn, {"title": title or f"Journal {issn}", "works": []})

    def add_work(self, item: dict, journal_issn: str | None = None) -> dict:
        self.works[item["DOI"].lower()] = item
        if journal_issn is not None:
            self.add_journal(journal_issn)
            self.journals[journal_issn]["works"].append(item)
        return item

    def add_citation(self, citing: str, cited: str, creation: str | None = None) -> None:
        rows = self.coci_rows.setdefault(cited.lower(), [])
        rows.append({
            "oci": f"oci:{len(rows)}-{cited}",
            "citing": citing,
            "cited": cited,
            "creation": creation or "2021-01",
            "timespan": "P1Y",
        })

    # --- scripting -------------------------------------------------------

    def fail_next(self, substring: str, times: int | None = 1, status: int = 500,
                  retry_after: str | None = None) -> None:
        self.fail_rules.append(FailRule(substring, times, status, retry_after))

    def requests_for(self, substring: str) -> list[LoggedRequest]:
        return [r for r in self.log if substring in r.path]

    def clear_log(self) -> None:
        self.log.clear()

    # --- request handling ----------------------------------------------

    def handle(self, service: str, method: str, path: str, query: dict,
               accept: str = "") -> tuple[int, dict, bytes]:
        for substring, seconds in self.delay_rules.items():
            if substring in path:
                time.sleep(seconds)
        with self.lock:
            self.log.append(LoggedRequest(time.monotonic(), method, f"/{service}{path}", query, accept))
            for rule in self.fail_rules:
                if rule.substring in path and (rule.times is None or rule.times > 0):
                    if rule.times is not None:
                        rule.times -= 1
                    headers = {"Retry-After": rule.retry_after} if rule.retry_after else {}
                    return rule.status, headers, b'{"status":"error"}'
            if service == "crossref":
                return self._handle_crossref(path, query)
            if service == "coci":
                return self._handle_coci(path)
            if service == "resolver":
                return self._handle_resolver(path, query, accept)
        return 404, {}, b"unknown service"

    # Crossref-shaped endpoints

    def _handle_crossref(self, path: str, query: dict) -> tuple[int, dict, bytes]:
        segments = [unquote(s) for s in path.strip("/").split("/")]
        if segments[0] == "journals":
            if len(segments) == 1:
                return self._journal_search(query)
            issn = segments[1]
            if issn not in self.journals:
                return 404, {}, b'{"status":"error","message-type":"route-not-found"}'
            if len(segments) == 2:
                record = self.journals[issn]
                return self._ok({"title": record["title"], "ISSN": [issn]})
            if segments[2] == "works":
                return self._journal_works(issn, query)
        if segments[0] == "works" and len(segments) >= 2:
            doi = "/".join(segments[1:]).lower()
            item = self.works.get(doi)
            if item is None:
                return 404, {}, b'{"status":"error","message-type":"work-not-found"}'
            return self._ok(item)
        return 404, {}, b'{"status":"error"}'

    def _journal_search(self, query: dict) -> tuple[int, dict, bytes]:
        needle = (query.get("query", [""])[0] or "").lower()
        matches = []
        for issn, record in self.journals.items():
            title = record["title"]
            pos = title.lower().find(needle)
            if needle and pos >= 0:
                matches.append((pos, title, issn))
        matches.sort()
        items = [{"title": title, "ISSN": [issn]} for _, title, issn in matches]
        rows = int(query.get("rows", ["20"])[0])
        return self._ok({"items": items[:rows], "total-results": len(items)})

    def _journal_works(self, issn: str, query: dict) -> tuple[int, dict, bytes]:
        matching = self._filtered_works(issn, query)
        rows = int(query.get("rows", ["20"])[0])
        cursor = query.get("cursor", ["*"])[0]
        offset = 0 if cursor == "*" else int(base64.urlsafe_b64decode(cursor).decode())
        page = matching[offset:offset + rows] if rows else []
        next_cursor = base64.urlsafe_b64encode(str(offset + len(page)).encode()).decode()
        selected = query.get("select", [None])[0]
        if selected:
            keep = set(selected.split(",")) | {"DOI"}
            page = [{k: v for k, v in item.items() if k in keep} for item in page]
        return self._ok({
            "total-results": len(matching),
            "items": page,
            "items-per-page": rows,
            "next-cursor": next_cursor,
        })

    def _filtered_works(self, issn: str, query: dict) -> list[dict]:
        from_date = until_date = None
        for clause in (query.get("filter", [""])[0] or "").split(","):
            if clause.startswith("from-pub-date:"):
                from_date = clause.split(":", 1)[1]
            elif clause.startswith("until-pub-date:"):
                until_date = clause.split(":", 1)[1]
        terms = (query.get("query.bibliographic", [""])[0] or "").lower().split()
        matching = []
        for item in self.journals[issn]["works"]:
            date = _expand_date(item)
            if from_date and (date is None or date < from_date):
                continue
            if until_date and (date is None or date > until_date):
                continue
            if terms:
                haystack = " ".join([
                    " ".join(item.get("title", [])),
                    item.get("abstract", "") or "",
                    " ".join(item.get("subject", [])),
                ]).lower()
                if not all(term in haystack for term in terms):
                    continue
            matching.append(item)
        return matching

    @staticmethod
    def _ok(message: dict) -> tuple[int, dict, bytes]:
        body = json.dumps({"status": "ok", "message": message}).encode("utf-8")
        return 200, {"Content-Type": "application/json"}, body

    # COCI-shaped endpoint

    def _handle_coci(self, path: str) -> tuple[int, dict, bytes]:
        segments = [unquote(s) for s in path.strip("/").split("/")]
        if segments[0] != "citations" or len(segments) < 2:
            return 404, {}, b"[]"
        doi = "/".join(segments[1:]).lower()
        rows = self.coci_rows.get(doi, [])
        return 200, {"Content-Type": "application/json"}, json.dumps(rows).encode()

    # DOI resolver with RIS content negotiation

    def _handle_resolver(self, path: str, query: dict, accept: str) -> tuple[int, dict, bytes]:
        doi = unquote(path.strip("/")).lower()
        hop = int(query.get("hop", ["0"])[0])
        hops_wanted = self.redirect_hops.get(doi, 0)
        if hop < hops_wanted:
            location = f"{RESOLVER_HOST}/{path.strip('/')}?hop={hop + 1}"
            return 302, {"Location": location}, b""
        if doi in self.ris_unavailable:
            return 406, {}, b"not acceptable"
        if "x-research-info-systems" not in accept:
            return 406, {}, b"not acceptable"
        body = self.ris_bodies.get(doi)
        if body is None:
            item = self.works.get(doi)
            if item is None:
                return 404, {}, b"DOI not found"
            body = default_ris(item)
        return 200, {"Content-Type": "application/x-research-info-systems"}, body.encode()


def _expand_date(item: dict) -> str | None:
    block = item.get("published") or item.get("issued")
    if not block or not block.get("date-parts"):
        return None
    parts = block["date-parts"][0]
    if not parts or parts[0] is None:
        return None
    year = int(parts[0])
    month = int(parts[1]) if len(parts) > 1 and parts[1] else 1
    day = int(parts[2]) if len(parts) > 2 and parts[2] else 1
    return f"{year:04d}-{month:02d}-{day:02d}"


def default_ris(item: dict) -> str:
    lines = ["TY  - JOUR"]
    titles = item.get("title") or []
    if titles:
        lines.append(f"TI  - {titles[0]}")
    lines.append(f"DO  - {item['DOI'].lower()}")
    lines.append("ER  - ")
    return "\n".join(lines) + "\n"


# --- transport adapter (in-process) ----------------------------------------

_HOST_SERVICES = {
    urlsplit(CROSSREF_HOST).netloc: "crossref",
    urlsplit(COCI_HOST).netloc: "coci",
    urlsplit(RESOLVER_HOST).netloc: "resolver",
}


class MockAdapter(BaseAdapter):
    def __init__(self, api: MockApi):
        super().__init__()
        self.api = api

    def send(self, request, stream=False, timeout=None, verify=True, cert=None, proxies=None):
        parts = urlsplit(request.url)
        service = _HOST_SERVICES[parts.netloc]
        status, headers, body = self.api.handle(
            service, request.method, parts.path,
            parse_qs(parts.query, keep_blank_values=True),
            request.headers.get("Accept", ""),
        )
        response = requests.Response()
        response.status_code = status
        response.headers.update(headers)
        response.url = request.url
        response.request = request
        response.raw = io.BytesIO(body)
        response._content = body
        response._content_consumed = True
        return response

    def close(self):
        pass


def mock_session(api: MockApi) -> requests.Session:
    session = requests.Session()
    adapter = MockAdapter(api)
    for host in (CROSSREF_HOST, COCI_HOST, RESOLVER_HOST):
        session.mount(host, adapter)
    return session


# --- loopback HTTP server ----------------------------------------------------


class MockServer:
    """Serves a MockApi over real sockets; paths are /crossref/..,
    /coci/.., /resolver/.."""

    def __init__(self, api: MockApi):
        self.api = api
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                parts = urlsplit(self.path)
                segments = parts.path.lstrip("/").split("/", 1)
                service = segments[0]
                subpath = "/" + (segments[1] if len(segments) > 1 else "")
                status, headers, body = outer.api.handle(
                    service, "GET", subpath,
                    parse_qs(parts.query, keep_blank_values=True),
                    self.headers.get("Accept", ""),
                )
                if status in (301, 302) and "Location" in headers:
                    # the adapter form uses absolute test-host URLs; over
                    # sockets, point back at this server
                    location = headers["Location"].replace(
                        RESOLVER_HOST, f"{outer.base_url}/resolver")
                    headers = {**headers, "Location": location}
                self.send_response(status)
                for name, value in headers.items():
                    self.send_header(name, value)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self.server.server_address
        return f"http://{host}:{port}"

    @property
    def crossref_url(self) -> str:
        return f"{self.base_url}/crossref"

    @property
    def coci_url(self) -> str:
        return f"{self.base_url}/coci"

    @property
    def resolver_url(self) -> str:
        return f"{self.base_url}/resolver"

    def start(self) -> "MockServer":
        self.thread.start()
        return self

    def stop(self) -> None:
        self.server.shutdown()
        self.server.server_close()


# --- random corpora -----------------------------------------------------------


def random_journal(api: MockApi, rng: random.Random, issn: str, n_works: int,
                   year: int = 2020, prefix: str = "10.5555") -> list[dict]:
    """Populate one journal with n deterministic pseudo-random works."""
    api.add_journal(issn)
    works = []
    for index in range(n_works):
        month = rng.randint(1, 12)
        day = rng.randint(1, 28)
        item = make_work(
            doi=f"{prefix}/{issn.replace('-', '').lower()}.{index}",
            title=f"Study {index} of {rng.choice(['alpha', 'beta', 'gamma', 'delta'])}",
            authors=[(f"Fam{rng.randint(0, 99)}", f"Giv{rng.randint(0, 99)}")],
            container=api.journals[issn]["title"],
            publisher="Mock Press",
            issn=issn,
            published=(year, month, day),
        )
        api.add_work(item, journal_issn=issn)
        works.append(item)
    return works
