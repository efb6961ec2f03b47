from __future__ import annotations

import json
import random
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsopt.profiles import (
    DsKind,
    ElementTypeTag,
    ProfileError,
    ProfileParseError,
    ProfileStore,
    SiteId,
    SizeClass,
    merge,
    parse,
    record_allocation,
    record_element_type,
    record_entry_access,
    record_get,
    record_insert,
    record_size_change,
    serialize,
    size_class_for,
)

SITE = SiteId.from_ctx("Foo.bar(): 4")
NESTED = SiteId.from_ctx("Foo.bar(): 10 > Foo.baz(): 4")


# ---------------------------------------------------------------------------
# size classes


def test_size_class_boundary_values():
    for bound, expected in zip(
        (0, 1, 2, 8, 16, 64, 256, 1024, 65536),
        (SizeClass.C0, SizeClass.C1, SizeClass.C2, SizeClass.C8, SizeClass.C16,
         SizeClass.C64, SizeClass.C256, SizeClass.C1024, SizeClass.C65536),
    ):
        assert size_class_for(bound) is expected


def test_size_class_17_counts_towards_64():
    assert size_class_for(17) is SizeClass.C64


def test_size_class_inclusive_and_overflow():
    assert size_class_for(2) is SizeClass.C2
    assert size_class_for(3) is SizeClass.C8
    assert size_class_for(70000) is SizeClass.INF
    assert size_class_for(65537) is SizeClass.INF


def test_size_class_rejects_negative():
    with pytest.raises(ValueError):
        size_class_for(-1)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 200000), st.integers(0, 200000))
def test_size_class_monotone(m, n):
    if m <= n:
        assert size_class_for(m) <= size_class_for(n)
    else:
        assert size_class_for(m) >= size_class_for(n)


def test_exactly_ten_classes():
    assert len(SizeClass) == 10
    assert SizeClass.INF.bound is None


# ---------------------------------------------------------------------------
# site identity


def test_ctx_round_trip_nested():
    assert NESTED.ctx == "Foo.bar(): 10 > Foo.baz(): 4"
    assert SiteId.from_ctx(NESTED.ctx) == NESTED


def test_site_equality_is_framewise():
    assert SiteId.at("Foo.bar()", 4) == SITE
    assert SiteId.at("Foo.bar()", 5) != SITE


def test_site_requires_frames():
    with pytest.raises(ValueError):
        SiteId(())
    with pytest.raises(ValueError):
        SiteId((("Foo.bar()", -1),))


def test_site_rejects_ambiguous_method_names():
    with pytest.raises(ValueError):
        SiteId((("Foo > Bar.baz()", 1),))
    # a method containing ": " still round-trips (the last separator wins)
    odd = SiteId((("Foo.bar(): 5", 2),))
    assert SiteId.from_ctx(odd.ctx) == odd


# ---------------------------------------------------------------------------
# recording


def test_record_allocation_fresh_site():
    store = ProfileStore()
    record_allocation(store, SITE, DsKind.HASH_MAP)
    profile = store.require(SITE)
    assert profile.allocations == 1
    assert profile.size_class_counts == [1] + [0] * 9


def test_seventy_allocations():
    store = ProfileStore()
    for _ in range(70):
        record_allocation(store, SITE, DsKind.HASH_MAP)
    assert store.require(SITE).allocations == 70


def test_kind_is_fixed_per_site():
    store = ProfileStore()
    record_allocation(store, SITE, DsKind.HASH_MAP)
    with pytest.raises(ProfileError):
        record_allocation(store, SITE, DsKind.HASH_SET)


def test_size_change_moves_between_classes():
    store = ProfileStore()
    record_allocation(store, SITE, DsKind.HASH_MAP)
    record_size_change(store, SITE, 0, 1)
    profile = store.require(SITE)
    assert profile.size_class_counts[:3] == [0, 1, 0]
    assert profile.max_size == 1


def test_shrinking_never_moves_classes():
    store = ProfileStore()
    record_allocation(store, SITE, DsKind.HASH_MAP)
    record_size_change(store, SITE, 0, 1)
    record_size_change(store, SITE, 1, 0)
    profile = store.require(SITE)
    assert profile.size_class_counts[:3] == [0, 1, 0]
    assert profile.max_size == 1


def test_size_change_16_to_17_crosses_into_class_64():
    store = ProfileStore()
    record_allocation(store, SITE, DsKind.HASH_MAP)
    record_size_change(store, SITE, 0, 16)
    record_size_change(store, SITE, 16, 17)
    profile = store.require(SITE)
    assert profile.size_class_counts[SizeClass.C16] == 0
    assert profile.size_class_counts[SizeClass.C64] == 1


def test_size_change_underflow_is_an_error():
    store = ProfileStore()
    record_allocation(store, SITE, DsKind.HASH_MAP)
    with pytest.raises(ProfileError):
        record_size_change(store, SITE, 5, 9)  # no instance ever reached class 8


def test_counters_require_known_site():
    store = ProfileStore()
    with pytest.raises(ProfileError):
        record_get(store, SITE)


def test_get_insert_entry_counters():
    store = ProfileStore()
    record_allocation(store, SITE, DsKind.HASH_MAP)
    for _ in range(76):
        record_get(store, SITE)
    record_insert(store, SITE)
    for _ in range(3):
        record_entry_access(store, SITE)
    profile = store.require(SITE)
    assert (profile.gets, profile.inserts, profile.entry_accesses) == (76, 1, 3)


def test_element_types_union_idempotent():
    store = ProfileStore()
    record_allocation(store, SITE, DsKind.ARRAY_LIST)
    record_element_type(store, SITE, ElementTypeTag.INT)
    record_element_type(store, SITE, ElementTypeTag.INT)
    assert store.require(SITE).element_types() == {ElementTypeTag.INT}
    record_element_type(store, SITE, ElementTypeTag.OBJECT)
    assert store.require(SITE).element_types() == {ElementTypeTag.INT, ElementTypeTag.OBJECT}


def test_element_types_random_tag_sequence():
    store = ProfileStore()
    record_allocation(store, SITE, DsKind.ARRAY_LIST)
    rng = random.Random(7)
    declared = set()
    for _ in range(100):
        tag = rng.choice(list(ElementTypeTag))
        declared.add(tag)
        record_element_type(store, SITE, tag)
    assert store.require(SITE).element_types() == declared


def test_element_types_rejected_for_non_lists():
    store = ProfileStore()
    record_allocation(store, SITE, DsKind.HASH_MAP)
    with pytest.raises(ProfileError):
        record_element_type(store, SITE, ElementTypeTag.INT)


def test_class_counts_conserve_allocations_under_random_ops():
    store = ProfileStore()
    rng = random.Random(99)
    sites = [SiteId.at("M.m()", i) for i in range(5)]
    maxima: dict[tuple[SiteId, int], int] = {}
    for site in sites:
        for instance in range(rng.randrange(1, 30)):
            record_allocation(store, site, DsKind.HASH_MAP)
            maxima[(site, instance)] = 0
    for (site, instance), _ in list(maxima.items()):
        for _ in range(rng.randrange(0, 6)):
            prev = maxima[(site, instance)]
            new = prev + rng.randrange(0, 9)
            record_size_change(store, site, prev, new)
            maxima[(site, instance)] = new
    for site in sites:
        profile = store.require(site)
        assert sum(profile.size_class_counts) == profile.allocations
        assert all(count >= 0 for count in profile.size_class_counts)


def test_concurrent_increments_are_exact():
    store = ProfileStore()
    record_allocation(store, SITE, DsKind.HASH_MAP)
    threads = 8
    per_thread = 5000

    def work():
        for _ in range(per_thread):
            record_get(store, SITE)
            record_insert(store, SITE)

    workers = [threading.Thread(target=work) for _ in range(threads)]
    for w in workers:
        w.start()
    for w in workers:
        w.join()
    profile = store.require(SITE)
    assert profile.gets == threads * per_thread
    assert profile.inserts == threads * per_thread


# ---------------------------------------------------------------------------
# serialization


def _listing_style_store() -> ProfileStore:
    store = ProfileStore()
    for _ in range(70):
        record_allocation(store, SITE, DsKind.HASH_MAP)
    record_size_change(store, SITE, 0, 1)
    for _ in range(76):
        record_get(store, SITE)
    for _ in range(14):
        record_allocation(store, NESTED, DsKind.HASH_MAP)
    record_size_change(store, NESTED, 0, 10)
    return store


def test_serialize_record_prefix_and_ctx():
    data = json.loads(serialize(_listing_style_store()))
    assert [entry["ctx"] for entry in data] == [
        "Foo.bar(): 10 > Foo.baz(): 4",
        "Foo.bar(): 4",
    ]  # sorted by ctx
    flat = {entry["ctx"]: entry for entry in data}
    records = flat["Foo.bar(): 4"]["records"]
    assert records[:3] == [70, 1, 76]
    assert len(records) == 16
    assert flat["Foo.bar(): 10 > Foo.baz(): 4"]["records"][:2] == [14, 10]


def test_serialize_empty_store():
    assert serialize(ProfileStore()) == "[]"


def test_parse_round_trip():
    store = _listing_style_store()
    assert parse(serialize(store)) == store


def test_parse_malformed_json():
    with pytest.raises(ProfileParseError):
        parse("{not json")


def test_parse_unknown_kind_names_ctx():
    document = json.dumps([{"kind": "TREE_MAP", "ctx": "A.b(): 1", "records": [0] * 16}])
    with pytest.raises(ProfileParseError, match="A.b"):
        parse(document)


def test_parse_wrong_arity_names_ctx():
    document = json.dumps([{"kind": "HASH_MAP", "ctx": "A.b(): 1", "records": [0] * 15}])
    with pytest.raises(ProfileParseError, match="15"):
        parse(document)


def test_parse_negative_counter():
    records = [1, 0, -3] + [0] * 13
    document = json.dumps([{"kind": "HASH_MAP", "ctx": "A.b(): 1", "records": records}])
    with pytest.raises(ProfileParseError, match="gets"):
        parse(document)


def test_parse_duplicate_ctx():
    entry = {"kind": "HASH_MAP", "ctx": "A.b(): 1", "records": [0] * 16}
    with pytest.raises(ProfileParseError, match="duplicate"):
        parse(json.dumps([entry, entry]))


# random store strategy for the round-trip property
_ctx_frames = st.lists(
    st.tuples(st.from_regex(r"[A-Z][a-z]{1,6}\.[a-z]{1,6}\(\)", fullmatch=True),
              st.integers(0, 99)),
    min_size=1,
    max_size=3,
)


@st.composite
def profile_stores(draw):
    store = ProfileStore()
    n_sites = draw(st.integers(0, 5))
    seen = set()
    for _ in range(n_sites):
        frames = tuple(draw(_ctx_frames))
        if frames in seen:
            continue
        seen.add(frames)
        site = SiteId(frames)
        kind = draw(st.sampled_from(list(DsKind)))
        allocations = draw(st.integers(1, 50))
        for _ in range(allocations):
            record_allocation(store, site, kind)
        # each growth moves at most one instance out of class 0, so cap by allocations
        for _ in range(draw(st.integers(0, min(10, allocations)))):
            new_max = draw(st.integers(0, 20))
            record_size_change(store, site, 0, new_max)
        profile = store.require(site)
        profile.gets = draw(st.integers(0, 500))
        profile.inserts = draw(st.integers(0, 500))
        profile.entry_accesses = draw(st.integers(0, 500))
        if kind is DsKind.ARRAY_LIST:
            profile.element_type_mask = draw(st.integers(0, (1 << 9) - 1))
    return store


@settings(max_examples=120, deadline=None)
@given(profile_stores())
def test_round_trip_property(store):
    assert parse(serialize(store)) == store


def test_class_underflow_detected_when_class_zero_drains():
    store = ProfileStore()
    for _ in range(2):
        record_allocation(store, SITE, DsKind.HASH_MAP)
    record_size_change(store, SITE, 0, 4)
    record_size_change(store, SITE, 0, 9)
    with pytest.raises(ProfileError):
        record_size_change(store, SITE, 0, 12)  # class 0 is already drained


# ---------------------------------------------------------------------------
# merge


def test_merge_with_empty_is_identity():
    store = _listing_style_store()
    assert merge(store, ProfileStore()) == store
    assert merge(ProfileStore(), store) == store


def test_merge_sums_and_max_combines():
    a = ProfileStore()
    b = ProfileStore()
    for _ in range(3):
        record_allocation(a, SITE, DsKind.HASH_MAP)
    for _ in range(4):
        record_allocation(b, SITE, DsKind.HASH_MAP)
    record_size_change(a, SITE, 0, 5)
    record_size_change(b, SITE, 0, 9)
    merged = merge(a, b)
    profile = merged.require(SITE)
    assert profile.allocations == 7
    assert profile.max_size == 9
    assert sum(profile.size_class_counts) == 7


def test_merge_kind_conflict():
    a = ProfileStore()
    b = ProfileStore()
    record_allocation(a, SITE, DsKind.HASH_MAP)
    record_allocation(b, SITE, DsKind.HASH_SET)
    with pytest.raises(ProfileError):
        merge(a, b)


@settings(max_examples=40, deadline=None)
@given(profile_stores(), profile_stores())
def test_merge_commutative(a, b):
    try:
        left = merge(a, b)
    except ProfileError:
        return  # kind conflicts are symmetric
    assert left == merge(b, a)


@settings(max_examples=25, deadline=None)
@given(profile_stores(), profile_stores(), profile_stores())
def test_merge_associative(a, b, c):
    try:
        left = merge(merge(a, b), c)
    except ProfileError:
        return
    assert left == merge(a, merge(b, c))
