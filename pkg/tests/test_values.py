from __future__ import annotations

import pytest

from dsopt.profiles import ElementTypeTag
from dsopt.values import NULL, Value, stable_hash


def test_equal_payloads_are_equal_and_hash_alike():
    assert Value("k") == Value("k")
    assert hash(Value("k")) == hash(Value("k"))
    assert Value("k") != Value("j")


def test_tag_does_not_affect_equality():
    assert Value(3, ElementTypeTag.INT) == Value(3)
    assert hash(Value(3, ElementTypeTag.INT)) == hash(Value(3))


def test_numeric_equality_consistency():
    # Python's ==: True == 1 and 2.0 == 2, so the hashes must agree too
    assert Value(True) == Value(1)
    assert hash(Value(True)) == hash(Value(1))
    assert Value(2.0) == Value(2)
    assert hash(Value(2.0)) == hash(Value(2))
    assert hash(Value(2.5)) != hash(Value(2))


def test_null_is_a_value_not_absence():
    assert NULL == Value(None)
    assert NULL != Value(0)


def test_tuples_and_negative_ints():
    assert stable_hash((1, "a")) == stable_hash((1, "a"))
    assert stable_hash((1, "a")) != stable_hash(("a", 1))
    assert stable_hash(-5) != stable_hash(5)


def test_stable_hash_is_process_independent():
    # frozen values computed once; any drift would break file reproducibility
    assert stable_hash(None) == 12638194897137039473
    assert stable_hash(0) == 627990497358252844
    assert stable_hash("k") == 637599129475296523
    assert stable_hash((1, 2)) == 9964072588281176730
    # distinct small payloads should not collide
    hashes = {stable_hash(i) for i in range(1000)}
    assert len(hashes) == 1000


def test_unhashable_payload_rejected():
    with pytest.raises(TypeError):
        Value([1, 2])
