import pytest

from litfetch import ClientPolicy, CociClient, CrossrefClient

from mockapi import (
    COCI_HOST,
    CROSSREF_HOST,
    RESOLVER_HOST,
    MockApi,
    MockServer,
    mock_session,
)


@pytest.fixture
def api():
    return MockApi()


@pytest.fixture
def fast_policy():
    # tiny intervals and backoffs so retry/rate tests stay fast
    return ClientPolicy(
        contact_email="reviewer@example.org",
        max_page_size=100,
        max_retries=2,
        initial_backoff=0.002,
        max_backoff=0.05,
        request_timeout=5.0,
        min_request_interval=0.001,
    )


@pytest.fixture
def session(api):
    return mock_session(api)


@pytest.fixture
def crossref(api, session, fast_policy):
    return CrossrefClient(
        base_url=CROSSREF_HOST,
        resolver_url=RESOLVER_HOST,
        policy=fast_policy,
        session=session,
    )


@pytest.fixture
def coci(api, session, fast_policy):
    return CociClient(base_url=COCI_HOST, policy=fast_policy, session=session)


@pytest.fixture
def server(api):
    mock = MockServer(api).start()
    yield mock
    mock.stop()
