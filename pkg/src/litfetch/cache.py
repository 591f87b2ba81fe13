"""On-disk persistence: raw upstream responses, search progress, results.

Responses are stored verbatim (raw bytes, never re-encoded) keyed by a
canonical request descriptor, one content-addressed pair of files per
entry. The same store doubles as the replay-fixture format for tests and
as the persistence layer for search progress and finished result sets.
Writes are atomic (temp file + rename) so concurrent readers never see a
torn entry.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import parse_qsl, urlencode, urlsplit, urlunsplit

from .errors import StorageError

LISTING_TTL = 7 * 24 * 3600.0  # journal listings grow; refresh weekly
METADATA_TTL = None  # deposited per-DOI metadata rarely changes; keep forever


def canonical_url(url: str) -> str:
    """Normalize a URL for keying: sorted query parameters, no fragment."""
    parts = urlsplit(url)
    query = urlencode(sorted(parse_qsl(parts.query, keep_blank_values=True)))
    return urlunsplit((parts.scheme, parts.netloc, parts.path, query, ""))


@dataclass(frozen=True)
class CacheKey:
    """Canonical request descriptor; equal requests produce equal keys."""

    method: str
    url: str
    accept: str = ""

    @classmethod
    def for_request(cls, method: str, url: str, accept: str = "") -> "CacheKey":
        return cls(method.upper(), canonical_url(url), accept)

    def digest(self) -> str:
        raw = f"{self.method}\n{self.url}\n{self.accept}".encode("utf-8")
        return hashlib.sha256(raw).hexdigest()


@dataclass
class CacheEntry:
    key: CacheKey
    body: bytes
    status: int
    stored_at: float


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(f".{path.name}.{os.getpid()}.{time.monotonic_ns()}.tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class FileCache:
    """Content-addressed file store under a single root directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._objects = self.root / "objects"
        self._objects.mkdir(parents=True, exist_ok=True)

    # --- raw response entries ------------------------------------------

    def get(self, key: CacheKey, ttl: float | None = None) -> CacheEntry | None:
        """Return the stored entry, or None if absent or older than ttl."""
        digest = key.digest()
        meta_path = self._objects / f"{digest}.json"
        body_path = self._objects / f"{digest}.bin"
        if not meta_path.exists():
            return None
        try:
            meta = json.loads(meta_path.read_text("utf-8"))
        except (ValueError, OSError) as exc:
            raise StorageError(f"corrupt cache entry {digest}: {exc}") from exc
        stored_at = float(meta["stored_at"])
        if ttl is not None and time.time() - stored_at > ttl:
            return None
        if not body_path.exists():
            return None
        return CacheEntry(key=key, body=body_path.read_bytes(),
                          status=int(meta["status"]), stored_at=stored_at)

    def put(self, key: CacheKey, body: bytes, status: int) -> CacheEntry:
        """Store an entry durably; same-key entries are overwritten."""
        digest = key.digest()
        stored_at = time.time()
        try:
            _atomic_write(self._objects / f"{digest}.bin", body)
            meta = {
                "method": key.method,
                "url": key.url,
                "accept": key.accept,
                "status": status,
                "stored_at": stored_at,
            }
            _atomic_write(self._objects / f"{digest}.json",
                          json.dumps(meta, sort_keys=True).encode("utf-8"))
        except OSError as exc:
            raise StorageError(f"cannot write cache entry: {exc}") from exc
        return CacheEntry(key=key, body=body, status=status, stored_at=stored_at)

    # --- namespaced JSON documents (progress, results, jobs) ------------

    def _doc_path(self, namespace: str, name: str) -> Path:
        digest = hashlib.sha256(name.encode("utf-8")).hexdigest()[:32]
        directory = self.root / namespace
        directory.mkdir(parents=True, exist_ok=True)
        return directory / f"{digest}.json"

    def put_json(self, namespace: str, name: str, document: dict) -> None:
        payload = {"name": name, "document": document}
        try:
            _atomic_write(self._doc_path(namespace, name),
                          json.dumps(payload, sort_keys=True).encode("utf-8"))
        except OSError as exc:
            raise StorageError(f"cannot write {namespace} document: {exc}") from exc

    def get_json(self, namespace: str, name: str) -> dict | None:
        path = self._doc_path(namespace, name)
        if not path.exists():
            return None
        try:
            return json.loads(path.read_text("utf-8"))["document"]
        except (ValueError, KeyError, OSError) as exc:
            raise StorageError(f"corrupt {namespace} document {name!r}: {exc}") from exc

    def list_json(self, namespace: str) -> list[dict]:
        directory = self.root / namespace
        if not directory.exists():
            return []
        documents = []
        for path in sorted(directory.glob("*.json")):
            try:
                documents.append(json.loads(path.read_text("utf-8"))["document"])
            except (ValueError, KeyError, OSError) as exc:
                raise StorageError(f"corrupt {namespace} document {path.name}: {exc}") from exc
        return documents

    # --- search progress -------------------------------------------------

    def record_progress(self, query_id: str, origin: str, cursor) -> None:
        """Persist the paging state for one origin of a running search."""
        progress = self.get_json("progress", query_id) or {"origins": {}}
        progress["origins"][origin] = {
            "token": cursor.token,
            "exhausted": cursor.exhausted,
        }
        self.put_json("progress", query_id, progress)

    def load_progress(self, query_id: str) -> dict[str, dict]:
        """Per-origin cursor state recorded so far; {} when none stored."""
        progress = self.get_json("progress", query_id)
        if not progress:
            return {}
        return dict(progress.get("origins", {}))

    def clear_progress(self, query_id: str) -> None:
        path = self._doc_path("progress", query_id)
        if path.exists():
            path.unlink()

    # --- finished result sets ---------------------------------------------

    def store_resultset(self, query_id: str, rs_jsonable: dict) -> None:
        self.put_json("results", query_id, rs_jsonable)

    def load_resultset(self, query_id: str) -> dict | None:
        return self.get_json("results", query_id)
