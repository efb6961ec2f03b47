from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsopt.costmodel import (
    REF,
    AllocationLedger,
    Category,
    DEFAULT_CONSTANTS,
    LayoutConstants,
    LayoutError,
    LedgerSnapshot,
    TypeLayout,
    array_size,
    object_size,
)


def test_object_size_header_only():
    assert object_size(TypeLayout("Bare", ())) == 16


def test_object_size_four_references():
    assert object_size(TypeLayout("Refs", (REF,) * 4)) == 48


def test_object_size_mixed_fields_align():
    # 16 + 8 + 8 + 1 + 4 = 37 -> 40
    assert object_size(TypeLayout("Mixed", (REF, REF, "byte", "int"))) == 40


def test_array_sizes():
    assert array_size(REF, 16) == 152
    assert array_size(REF, 0) == 24
    assert array_size("int", 3) == 40  # 24 + 12 = 36 -> 40


def test_array_size_rejects_negative_length():
    with pytest.raises(ValueError):
        array_size(REF, -1)


def test_unknown_field_kind():
    with pytest.raises(LayoutError):
        object_size(TypeLayout("Bad", ("decimal",)))


def test_constants_validation():
    with pytest.raises(LayoutError):
        LayoutConstants(alignment_bytes=6)
    with pytest.raises(LayoutError):
        LayoutConstants(reference_bytes=0)


def test_custom_constants_change_sizes():
    compressed = LayoutConstants(object_header_bytes=12, reference_bytes=4)
    assert object_size(TypeLayout("Refs", (REF,) * 4), compressed) == 32  # 12 + 16 -> 28 -> 32


_field_kinds = st.sampled_from([REF, "byte", "boolean", "short", "char", "int",
                                "float", "long", "double"])


@settings(max_examples=200, deadline=None)
@given(st.lists(_field_kinds, max_size=12))
def test_object_size_is_aligned_and_monotone(fields):
    size = object_size(TypeLayout("T", tuple(fields)))
    assert size % DEFAULT_CONSTANTS.alignment_bytes == 0
    assert size >= DEFAULT_CONSTANTS.object_header_bytes
    if fields:
        smaller = object_size(TypeLayout("T", tuple(fields[:-1])))
        assert smaller <= size


@settings(max_examples=200, deadline=None)
@given(_field_kinds, st.integers(0, 4096))
def test_array_size_is_aligned_and_monotone(kind, length):
    size = array_size(kind, length)
    assert size % DEFAULT_CONSTANTS.alignment_bytes == 0
    assert array_size(kind, length + 1) >= size


# ---------------------------------------------------------------------------
# ledger


def test_single_charge():
    ledger = AllocationLedger()
    ledger.charge(Category.HASH_MAP, 152)
    snap = ledger.snapshot()
    assert snap.category(Category.HASH_MAP) .bytes == 152
    assert snap.category(Category.HASH_MAP).count == 1
    assert snap.overall_bytes == 152


def test_charges_are_additive():
    ledger = AllocationLedger()
    ledger.charge(Category.HASH_MAP, 100)
    ledger.charge(Category.HASH_MAP, 52)
    assert ledger.snapshot().overall_bytes == 152


def test_category_isolation():
    ledger = AllocationLedger()
    ledger.charge(Category.ELEMENT_DATA, 24)
    snap = ledger.snapshot()
    assert snap.category(Category.HASH_MAP).bytes == 0
    assert snap.category(Category.ELEMENT_DATA).bytes == 24


def test_negative_charge_rejected():
    with pytest.raises(ValueError):
        AllocationLedger().charge(Category.OTHER, -1)


def test_ledger_conservation_over_random_charges():
    ledger = AllocationLedger()
    rng = random.Random(4)
    categories = list(Category)
    for _ in range(500):
        ledger.charge(rng.choice(categories), rng.randrange(0, 400) * 8)
    snap = ledger.snapshot()
    assert snap.overall_bytes == sum(t.bytes for t in snap.categories.values())


def test_snapshot_is_immutable_copy():
    ledger = AllocationLedger()
    ledger.charge(Category.HASH_MAP, 64)
    before = ledger.snapshot()
    ledger.charge(Category.HASH_MAP, 64)
    assert before.category(Category.HASH_MAP).bytes == 64
    assert ledger.snapshot().category(Category.HASH_MAP).bytes == 128


def test_fresh_ledger_snapshot_is_zero_and_stable():
    ledger = AllocationLedger()
    assert ledger.snapshot() == ledger.snapshot()
    assert ledger.snapshot().overall_bytes == 0


def test_concurrent_charges_are_exact():
    import threading

    ledger = AllocationLedger()
    threads, per_thread = 8, 4000

    def work():
        for _ in range(per_thread):
            ledger.charge(Category.HASH_MAP, 8)

    workers = [threading.Thread(target=work) for _ in range(threads)]
    for w in workers:
        w.start()
    for w in workers:
        w.join()
    total = ledger.snapshot().category(Category.HASH_MAP)
    assert total.count == threads * per_thread
    assert total.bytes == threads * per_thread * 8


def test_snapshot_json_round_trip():
    ledger = AllocationLedger()
    ledger.charge(Category.HASH_SET, 40)
    ledger.charge(Category.OTHER, 8)
    snap = ledger.snapshot()
    data = snap.to_json_dict()
    assert data["overall"] == 48
    assert data["categories"]["HASH_SET"] == {"count": 1, "bytes": 40}
    restored = LedgerSnapshot.from_json_dict(data)
    assert restored.overall_bytes == snap.overall_bytes
    assert dict(restored.categories) == dict(snap.categories)
