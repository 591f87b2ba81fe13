import datetime as dt
import random

import pytest
from hypothesis import given, strategies as st

from litfetch import DOI, DateRange, WorkMetadata, doi_set, filter_by_daterange, merge
from litfetch.ids import PartialDate
from litfetch.resultset import ResultSet, SourceTag


TAG_A = SourceTag(kind="handsearch", origin="0000-0000", query_id="qa")
TAG_B = SourceTag(kind="handsearch", origin="0028-0836", query_id="qb")
TAG_SNOW = SourceTag(kind="snowball-backward", origin="10.1/seed", query_id="qs")


def rs_from(dois, tag=TAG_A, **work_kwargs):
    works = [WorkMetadata(doi=DOI(d), **work_kwargs) for d in dois]
    return ResultSet.build(works, tag)


def test_source_tag_origin_must_match_kind():
    with pytest.raises(Exception):
        SourceTag(kind="handsearch", origin="10.1/not-an-issn", query_id="q")
    with pytest.raises(Exception):
        SourceTag(kind="snowball-forward", origin="0028-0836", query_id="q")


def test_build_dedups_within_a_search():
    rs = rs_from(["10.1/a", "10.1/a", "10.2/b"])
    assert [d.value for d in doi_set(rs)] == ["10.1/a", "10.2/b"]


def test_merge_identity():
    x = rs_from(["10.1/a", "10.2/b"])
    empty = ResultSet()
    assert [d.value for d in doi_set(merge(x, empty))] == ["10.1/a", "10.2/b"]
    assert [d.value for d in doi_set(merge(empty, x))] == ["10.1/a", "10.2/b"]


def test_merge_idempotent():
    x = rs_from(["10.1/a", "10.2/b", "10.3/c"])
    merged = merge(x, x)
    assert len(merged) == len(x)
    assert doi_set(merged) == doi_set(x)


def test_merge_overlap_count_matches_set_oracle():
    rng = random.Random(7)
    pool = [f"10.9/{i}" for i in range(150)]
    a_dois = rng.sample(pool, 100)
    b_dois = rng.sample(pool, 80)
    shared = set(a_dois) & set(b_dois)
    merged = merge(rs_from(a_dois), rs_from(b_dois, tag=TAG_B))
    assert len(merged) == 100 + 80 - len(shared)
    assert {d.value for d in doi_set(merged)} == set(a_dois) | set(b_dois)


def test_merge_keeps_left_metadata_and_concats_provenance():
    left = rs_from(["10.1/x"], title="left title")
    right = rs_from(["10.1/x"], tag=TAG_B, title="right title")
    merged = merge(left, right)
    assert merged.entries[0].work.title == "left title"
    assert merged.entries[0].provenance == [TAG_A, TAG_B]


def test_merge_never_drops_provenance():
    a = rs_from(["10.1/a", "10.2/b"])
    b = rs_from(["10.2/b", "10.3/c"], tag=TAG_SNOW)
    merged = merge(a, b)
    tags = {t for e in merged.entries for t in e.provenance}
    assert tags == {TAG_A, TAG_SNOW}
    for entry in merged.entries:
        assert len(entry.provenance) >= 1


def test_merge_order_left_then_right_only():
    a = rs_from(["10.1/a", "10.2/b"])
    b = rs_from(["10.3/c", "10.2/b", "10.4/d"], tag=TAG_B)
    merged = merge(a, b)
    assert [d.value for d in doi_set(merged)] == ["10.1/a", "10.2/b", "10.3/c", "10.4/d"]


def test_merge_does_not_mutate_operands():
    a = rs_from(["10.1/a"])
    b = rs_from(["10.1/a"], tag=TAG_B)
    merge(a, b)
    assert a.entries[0].provenance == [TAG_A]
    assert b.entries[0].provenance == [TAG_B]


_doi_lists = st.lists(
    st.integers(min_value=0, max_value=40).map(lambda i: f"10.7/{i}"),
    max_size=30,
)


@given(_doi_lists, _doi_lists, _doi_lists)
def test_merge_membership_is_set_union(xs, ys, zs):
    a, b, c = rs_from(xs), rs_from(ys, tag=TAG_B), rs_from(zs, tag=TAG_SNOW)
    merged = merge(merge(a, b), c)
    assert {d.value for d in doi_set(merged)} == set(xs) | set(ys) | set(zs)
    assert len(merged) <= len(a) + len(b) + len(c)
    # associative up to order
    other = merge(a, merge(b, c))
    assert {d.value for d in doi_set(other)} == {d.value for d in doi_set(merged)}


@given(_doi_lists, _doi_lists)
def test_doi_set_of_merge_is_deduped_concat(xs, ys):
    a, b = rs_from(xs), rs_from(ys, tag=TAG_B)
    merged_dois = [d.value for d in doi_set(merge(a, b))]
    expected, seen = [], set()
    for value in [d.value for d in doi_set(a)] + [d.value for d in doi_set(b)]:
        if value not in seen:
            seen.add(value)
            expected.append(value)
    assert merged_dois == expected


def test_filter_by_daterange():
    r = DateRange.parse("2020-06-01", "2020-12-31")
    inside = WorkMetadata(doi=DOI("10.1/in"), published=PartialDate(2020, 7, 1))
    year_only = WorkMetadata(doi=DOI("10.1/year"), published=PartialDate(2020))
    outside = WorkMetadata(doi=DOI("10.1/out"), published=PartialDate(2019, 5, 1))
    rs = ResultSet.build([inside, year_only, outside], TAG_A)
    kept = filter_by_daterange(rs, r)
    assert [d.value for d in doi_set(kept)] == ["10.1/in", "10.1/year"]
    all_inside = ResultSet.build([inside], TAG_A)
    assert len(filter_by_daterange(all_inside, r)) == 1


def test_doi_set_empty_and_ordered():
    assert doi_set(ResultSet()) == []
    rs = rs_from(["10.1/c", "10.1/a", "10.1/b"])
    assert [d.value for d in doi_set(rs)] == ["10.1/c", "10.1/a", "10.1/b"]


def test_jsonable_round_trip():
    created = dt.datetime(2024, 5, 1, 12, 0, tzinfo=dt.timezone.utc)
    rs = ResultSet.build(
        [WorkMetadata(doi=DOI("10.1/a"), title="T", published=PartialDate(2020, 2))],
        TAG_A, created_at=created)
    restored = ResultSet.from_jsonable(rs.to_jsonable())
    assert restored.created_at == created
    assert restored.entries[0].work == rs.entries[0].work
    assert restored.entries[0].provenance == [TAG_A]
