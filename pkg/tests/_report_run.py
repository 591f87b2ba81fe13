"""Rebuild the deterministic acceptance corpus in a fresh process, run the
same handsearch with the same fixed clock, and print the structured report.

Used by the report-reproducibility acceptance criterion to show that
report bytes survive a process restart.
"""

import datetime as dt
import random
import sys

from litfetch import (
    ClientPolicy,
    CrossrefClient,
    DateRange,
    HandsearchQuery,
    render_report,
    run_handsearch,
    validate_issn,
)

from mockapi import CROSSREF_HOST, RESOLVER_HOST, MockApi, issn_with_checksum, mock_session, random_journal

FIXED_CLOCK = dt.datetime(2024, 6, 1, 8, 30, 0, tzinfo=dt.timezone.utc)
SEED = 20240601
ISSN_ONE = issn_with_checksum("5550001")
ISSN_TWO = issn_with_checksum("5550002")


def build_api() -> MockApi:
    api = MockApi()
    rng = random.Random(SEED)
    random_journal(api, rng, ISSN_ONE, 37)
    random_journal(api, rng, ISSN_TWO, 23)
    return api


def run() -> str:
    api = build_api()
    client = CrossrefClient(
        base_url=CROSSREF_HOST,
        resolver_url=RESOLVER_HOST,
        policy=ClientPolicy(min_request_interval=0.001, initial_backoff=0.001),
        session=mock_session(api),
    )
    query = HandsearchQuery(
        journals=(validate_issn(ISSN_ONE), validate_issn(ISSN_TWO)),
        range=DateRange.parse("2020-01-01", "2020-12-31"),
    )
    _, report = run_handsearch(query, client, clock=lambda: FIXED_CLOCK)
    return render_report(report, "structured")


if __name__ == "__main__":
    sys.stdout.write(run())
