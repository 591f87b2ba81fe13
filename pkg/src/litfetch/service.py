"""HTTP service: asynchronous search jobs, results, reports, exports.

Searches can outlive any sensible request timeout, so submissions return
a job id immediately and clients poll. At most K jobs run concurrently;
the rest queue FIFO up to a configured depth. Finished jobs (including
their result sets and reports) are persisted through the cache store, so
a restart does not lose completed searches. No authentication: the
deployment model is a single team on localhost.
"""

from __future__ import annotations

import logging
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import config as config_mod
from .config import Config
from .errors import (
    ClientError,
    InvalidDateRange,
    InvalidKeyword,
    InvalidQuery,
    IssnChecksumFailed,
    MalformedDoi,
    MalformedIssn,
    StorageError,
    UnknownJournal,
)
from .export import EXPORT_EXTENSIONS, to_doi_text, to_ris
from .handsearch import HandsearchQuery, run_handsearch
from .ids import DateRange, KeywordList, parse_doi_list, validate_issn
from .report import render_report, report_from_jsonable, report_to_jsonable
from .resultset import ResultSet
from .snowball import SnowballQuery, snowball_backward, snowball_forward

logger = logging.getLogger(__name__)

RIS_MEDIA_TYPE = "application/x-research-info-systems"

TERMINAL_STATES = ("succeeded", "failed", "partial")


@dataclass
class ServiceSettings:
    config: Config = dc_field(default_factory=Config)
    max_concurrent_jobs: int = 2
    queue_depth: int = 32
    cors_origins: tuple[str, ...] = ("*",)
    static_dir: str | None = None


@dataclass
class JobRecord:
    job_id: str
    kind: str  # handsearch | snowball
    query: dict
    state: str = "queued"  # queued | running | succeeded | failed | partial
    progress: dict = dc_field(default_factory=dict)  # origin -> {fetched, declared}
    result_ref: str | None = None
    results: list | None = None  # table rows for the UI, set on finish
    report: dict | None = None
    error: str | None = None

    def to_document(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "state": self.state,
            "query": self.query,
            "progress": self.progress,
            "result_ref": self.result_ref,
            "results": self.results,
            "report": self.report,
            "error": self.error,
        }


def result_rows(rs: ResultSet) -> list[dict]:
    """Flatten a result set into the table rows the job document carries."""
    return [
        {
            "doi": e.work.doi.value,
            "title": e.work.title,
            "authors": "; ".join(a.display() for a in e.work.authors),
            "year": e.work.published.year if e.work.published else None,
            "journal": e.work.container_title,
        }
        for e in rs.entries
    ]


class JobStore:
    """In-memory job table with optional persistence through the cache store.

    All mutations run under one lock, so pollers always observe a
    consistent record and state never regresses.
    """

    def __init__(self, cache=None):
        self._lock = threading.Lock()
        self._jobs: dict[str, JobRecord] = {}
        self._results: dict[str, ResultSet] = {}
        self._cache = cache
        if cache is not None:
            for document in cache.list_json("jobs"):
                record = JobRecord(**{k: document.get(k) for k in (
                    "job_id", "kind", "query", "state", "progress",
                    "result_ref", "results", "report", "error")})
                self._jobs[record.job_id] = record

    def add(self, record: JobRecord) -> None:
        with self._lock:
            self._jobs[record.job_id] = record
            self._persist(record)

    def get(self, job_id: str) -> JobRecord | None:
        with self._lock:
            return self._jobs.get(job_id)

    def snapshot(self, job_id: str) -> dict | None:
        with self._lock:
            record = self._jobs.get(job_id)
            return None if record is None else record.to_document()

    def count_active(self) -> int:
        with self._lock:
            return sum(1 for r in self._jobs.values()
                       if r.state in ("queued", "running"))

    def set_running(self, job_id: str) -> None:
        with self._lock:
            record = self._jobs[job_id]
            if record.state == "queued":
                record.state = "running"
                self._persist(record)

    def update_progress(self, job_id: str, origin: str, fetched: int, declared: int) -> None:
        with self._lock:
            record = self._jobs[job_id]
            entry = record.progress.setdefault(origin, {"fetched": 0, "declared": 0})
            entry["fetched"] = max(entry["fetched"], fetched)
            entry["declared"] = max(entry["declared"], declared)

    def finish(self, job_id: str, state: str, rs: ResultSet | None = None,
               report: dict | None = None, error: str | None = None) -> None:
        assert state in TERMINAL_STATES
        with self._lock:
            record = self._jobs[job_id]
            if record.state in TERMINAL_STATES:
                return
            record.state = state
            record.report = report
            record.error = error
            if rs is not None:
                record.result_ref = job_id
                record.results = result_rows(rs)
                self._results[job_id] = rs
                if self._cache is not None:
                    self._cache.put_json("job_results", job_id, rs.to_jsonable())
            self._persist(record)

    def resultset(self, job_id: str) -> ResultSet | None:
        with self._lock:
            rs = self._results.get(job_id)
        if rs is not None:
            return rs
        if self._cache is not None:
            stored = self._cache.get_json("job_results", job_id)
            if stored is not None:
                return ResultSet.from_jsonable(stored)
        return None

    def _persist(self, record: JobRecord) -> None:
        if self._cache is not None:
            try:
                self._cache.put_json("jobs", record.job_id, record.to_document())
            except StorageError as exc:
                logger.warning("cannot persist job %s: %s", record.job_id, exc)


def _validation_error(errors: list[dict]) -> JSONResponse:
    return JSONResponse(status_code=400, content={"errors": errors})


def _parse_handsearch_body(body: dict):
    errors: list[dict] = []
    journals = []
    raw_journals = body.get("journals")
    if not isinstance(raw_journals, list) or not raw_journals:
        errors.append({"field": "journals", "message": "journals must be a non-empty list of ISSNs"})
    else:
        for raw in raw_journals:
            try:
                journals.append(validate_issn(str(raw)))
            except (MalformedIssn, IssnChecksumFailed) as exc:
                errors.append({"field": "journals", "message": str(exc)})
    date_range = None
    try:
        date_range = DateRange.parse(str(body.get("from", "")), str(body.get("until", "")))
    except InvalidDateRange as exc:
        errors.append({"field": "range", "message": str(exc)})
    keywords = KeywordList()
    raw_keywords = body.get("keywords", [])
    if isinstance(raw_keywords, str):
        keywords = KeywordList.parse(raw_keywords)
    elif isinstance(raw_keywords, list):
        try:
            keywords = KeywordList(tuple(str(k) for k in raw_keywords))
        except InvalidKeyword as exc:
            errors.append({"field": "keywords", "message": str(exc)})
    else:
        errors.append({"field": "keywords", "message": "keywords must be a list or string"})
    if errors:
        return None, errors
    try:
        return HandsearchQuery(journals=tuple(journals), range=date_range,
                               keywords=keywords), []
    except InvalidQuery as exc:
        return None, [{"field": "journals", "message": str(exc)}]


def _parse_snowball_body(body: dict):
    errors: list[dict] = []
    raw_seeds = body.get("seeds")
    if isinstance(raw_seeds, list):
        raw_seeds = ",".join(str(s) for s in raw_seeds)
    if not isinstance(raw_seeds, str) or not raw_seeds.strip():
        errors.append({"field": "seeds", "message": "seeds must be a non-empty list or comma-separated string"})
        return None, errors
    try:
        seeds = parse_doi_list(raw_seeds)
    except MalformedDoi as exc:
        return None, [{"field": "seeds", "message": str(exc)}]
    direction = body.get("direction")
    if direction not in ("forward", "backward"):
        errors.append({"field": "direction", "message": "direction must be 'forward' or 'backward'"})
    hydrate = body.get("hydrate", True)
    if not isinstance(hydrate, bool):
        errors.append({"field": "hydrate", "message": "hydrate must be a boolean"})
    if errors:
        return None, errors
    try:
        return SnowballQuery(seeds=tuple(seeds), direction=direction, hydrate=hydrate), []
    except InvalidQuery as exc:
        return None, [{"field": "seeds", "message": str(exc)}]


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings()
    config = settings.config
    cache = config_mod.build_cache(config)
    store = JobStore(cache)
    pool = ThreadPoolExecutor(max_workers=settings.max_concurrent_jobs,
                              thread_name_prefix="litfetch-job")

    app = FastAPI(title="litfetch service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(settings.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.job_store = store

    def run_job(job_id: str, query) -> None:
        store.set_running(job_id)

        def on_progress(origin: str, fetched: int, declared: int) -> None:
            store.update_progress(job_id, origin, fetched, declared)

        extras = {"effective_config": config.echo()}
        try:
            if isinstance(query, HandsearchQuery):
                client = config_mod.build_crossref(config, cache)
                rs, rep = run_handsearch(
                    query, client,
                    continue_on_error=config.continue_on_error,
                    parallelism=config.parallelism,
                    cache=cache, on_progress=on_progress, query_extras=extras)
            elif query.direction == "backward":
                client = config_mod.build_crossref(config, cache)
                rs, rep = snowball_backward(
                    query, client,
                    continue_on_error=config.continue_on_error,
                    on_progress=on_progress, query_extras=extras)
            else:
                coci = config_mod.build_coci(config, cache)
                crossref = config_mod.build_crossref(config, cache)
                rs, rep = snowball_forward(
                    query, coci, crossref,
                    on_progress=on_progress, query_extras=extras)
        except ClientError as exc:
            logger.warning("job %s failed: %s", job_id, exc)
            store.finish(job_id, "failed", error=str(exc))
            return
        except Exception as exc:  # keep the worker pool alive
            logger.exception("job %s crashed", job_id)
            store.finish(job_id, "failed", error=f"internal error: {exc}")
            return
        state = "partial" if rep.outcome == "partial" else "succeeded"
        store.finish(job_id, state, rs=rs, report=report_to_jsonable(rep))

    def submit(kind: str, query) -> JSONResponse:
        if store.count_active() >= settings.queue_depth:
            return JSONResponse(status_code=429,
                                content={"error": "job queue is full, retry later"})
        job_id = uuid.uuid4().hex[:12]
        record = JobRecord(job_id=job_id, kind=kind, query=query.report_query())
        store.add(record)
        pool.submit(run_job, job_id, query)
        return JSONResponse(status_code=202, content={"job_id": job_id})

    @app.post("/api/handsearch")
    async def post_handsearch(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _validation_error([{"field": "body", "message": "request body must be JSON"}])
        query, errors = _parse_handsearch_body(body if isinstance(body, dict) else {})
        if errors:
            return _validation_error(errors)
        return submit("handsearch", query)

    @app.post("/api/snowball")
    async def post_snowball(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _validation_error([{"field": "body", "message": "request body must be JSON"}])
        query, errors = _parse_snowball_body(body if isinstance(body, dict) else {})
        if errors:
            return _validation_error(errors)
        return submit("snowball", query)

    @app.get("/api/jobs/{job_id}")
    async def get_job(job_id: str):
        document = store.snapshot(job_id)
        if document is None:
            return JSONResponse(status_code=404, content={"error": "unknown job"})
        return JSONResponse(content=document)

    @app.get("/api/jobs/{job_id}/export")
    async def get_export(job_id: str, format: str = "doi"):
        record = store.get(job_id)
        if record is None:
            return JSONResponse(status_code=404, content={"error": "unknown job"})
        if format not in ("doi", "ris"):
            return JSONResponse(status_code=400,
                                content={"error": f"unknown format {format!r}; use doi or ris"})
        if record.state not in ("succeeded", "partial"):
            return JSONResponse(status_code=409,
                                content={"error": f"job is {record.state}, not finished"})
        rs = store.resultset(job_id)
        if rs is None:
            return JSONResponse(status_code=409, content={"error": "result set unavailable"})
        query_id = record.query.get("query_id", job_id)
        filename = f"{query_id}.{EXPORT_EXTENSIONS[format]}"
        if format == "doi":
            payload, media = to_doi_text(rs), "text/plain; charset=utf-8"
        else:
            payload, media = to_ris(rs, mode="assembled").text, RIS_MEDIA_TYPE
        return Response(
            content=payload.encode("utf-8"),
            media_type=media,
            headers={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    @app.get("/api/jobs/{job_id}/report")
    async def get_report(job_id: str):
        record = store.get(job_id)
        if record is None:
            return JSONResponse(status_code=404, content={"error": "unknown job"})
        if record.state not in ("succeeded", "partial") or record.report is None:
            return JSONResponse(status_code=409,
                                content={"error": f"job is {record.state}, not finished"})
        text = render_report(report_from_jsonable(record.report), "structured")
        return Response(content=text.encode("utf-8"), media_type="application/json")

    @app.get("/api/journals")
    async def get_journals(q: str = ""):
        if not q.strip():
            return _validation_error([{"field": "q", "message": "query must be non-empty"}])
        client = config_mod.build_crossref(config, cache)
        try:
            candidates = client.lookup_journal(q)
        except UnknownJournal:
            candidates = []
        return JSONResponse(content={"candidates": [
            {"title": c.title, "issns": [i.value for i in c.issns]}
            for c in candidates[:20]
        ]})

    static_dir = settings.static_dir or str(Path(__file__).resolve().parents[2] / "frontend" / "dist")
    if Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
