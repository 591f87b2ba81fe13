import json
import time
from concurrent.futures import ThreadPoolExecutor

import pytest

from litfetch import CacheKey, FileCache
from litfetch.crossref import PageCursor
from litfetch.errors import StorageError


def test_canonical_key_sorts_query_params():
    a = CacheKey.for_request("get", "http://x.test/w?b=2&a=1")
    b = CacheKey.for_request("GET", "http://x.test/w?a=1&b=2")
    assert a == b
    assert a.digest() == b.digest()


def test_key_distinguishes_accept_header():
    a = CacheKey.for_request("GET", "http://x.test/w", accept="application/json")
    b = CacheKey.for_request("GET", "http://x.test/w", accept="application/x-research-info-systems")
    assert a.digest() != b.digest()


def test_missing_key_absent(tmp_path):
    cache = FileCache(tmp_path)
    assert cache.get(CacheKey.for_request("GET", "http://x.test/nope")) is None


def test_put_get_round_trip_bytes(tmp_path):
    cache = FileCache(tmp_path)
    key = CacheKey.for_request("GET", "http://x.test/w")
    body = b'{"x": 1}\x00\xff raw bytes'
    cache.put(key, body, 200)
    entry = cache.get(key)
    assert entry.body == body
    assert entry.status == 200


def test_ttl_expiry_treated_as_absent(tmp_path):
    cache = FileCache(tmp_path)
    key = CacheKey.for_request("GET", "http://x.test/w")
    cache.put(key, b"data", 200)
    assert cache.get(key, ttl=60) is not None
    time.sleep(0.05)
    assert cache.get(key, ttl=0.01) is None
    assert cache.get(key, ttl=None) is not None  # infinite TTL keeps it


def test_overwrite_latest_wins(tmp_path):
    cache = FileCache(tmp_path)
    key = CacheKey.for_request("GET", "http://x.test/w")
    cache.put(key, b"old", 200)
    cache.put(key, b"new", 200)
    assert cache.get(key).body == b"new"


def test_survives_process_restart(tmp_path):
    key = CacheKey.for_request("GET", "http://x.test/w")
    FileCache(tmp_path).put(key, b"persisted", 200)
    # a fresh instance stands in for a new process
    assert FileCache(tmp_path).get(key).body == b"persisted"


def test_concurrent_puts_to_distinct_keys(tmp_path):
    cache = FileCache(tmp_path)
    keys = [CacheKey.for_request("GET", f"http://x.test/w/{i}") for i in range(64)]

    def put(i):
        cache.put(keys[i], f"body-{i}".encode(), 200)

    with ThreadPoolExecutor(max_workers=16) as pool:
        list(pool.map(put, range(64)))
    for i, key in enumerate(keys):
        assert cache.get(key).body == f"body-{i}".encode()


def test_corrupt_meta_raises_storage_error(tmp_path):
    cache = FileCache(tmp_path)
    key = CacheKey.for_request("GET", "http://x.test/w")
    cache.put(key, b"ok", 200)
    meta_path = cache._objects / f"{key.digest()}.json"
    meta_path.write_text("{not json", encoding="utf-8")
    with pytest.raises(StorageError):
        cache.get(key)


def test_progress_round_trip(tmp_path):
    cache = FileCache(tmp_path)
    assert cache.load_progress("qid") == {}
    cache.record_progress("qid", "0000-0000", PageCursor(token="t1", exhausted=False))
    cache.record_progress("qid", "0028-0836", PageCursor(token="t2", exhausted=True))
    cache.record_progress("qid", "0000-0000", PageCursor(token="t3", exhausted=True))
    progress = cache.load_progress("qid")
    assert progress["0000-0000"] == {"token": "t3", "exhausted": True}
    assert progress["0028-0836"] == {"token": "t2", "exhausted": True}
    cache.clear_progress("qid")
    assert cache.load_progress("qid") == {}


def test_resultset_store_round_trip(tmp_path):
    cache = FileCache(tmp_path)
    assert cache.load_resultset("qid") is None
    cache.store_resultset("qid", {"entries": [1, 2, 3]})
    assert cache.load_resultset("qid") == {"entries": [1, 2, 3]}


def test_json_namespaces_are_isolated(tmp_path):
    cache = FileCache(tmp_path)
    cache.put_json("jobs", "a", {"v": 1})
    cache.put_json("results", "a", {"v": 2})
    assert cache.get_json("jobs", "a") == {"v": 1}
    assert cache.get_json("results", "a") == {"v": 2}
    assert len(cache.list_json("jobs")) == 1
