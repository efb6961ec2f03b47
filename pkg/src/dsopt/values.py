"""Opaque element values stored in the modeled collections.

A :class:`Value` wraps an arbitrary payload plus an optional declared
element-type tag (used by lists to detect single-primitive contents).
Hashing is deliberately independent of ``PYTHONHASHSEED`` so that runs are
reproducible across processes: equal payloads always hash equally, and the
hash follows Python's numeric equality (``True == 1``, ``2.0 == 2``).
"""

from __future__ import annotations

import struct

from .profiles import ElementTypeTag

_MASK64 = (1 << 64) - 1
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _fnv(h: int, data: bytes) -> int:
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def _hash_int(value: int) -> int:
    length = (value.bit_length() + 8) // 8 or 1
    return _fnv(_fnv(_FNV_OFFSET, b"i"), value.to_bytes(length, "little", signed=True))


def stable_hash(payload: object) -> int:
    """Process-independent 64-bit hash, consistent with ``==`` on payloads."""
    if payload is None:
        return _fnv(_FNV_OFFSET, b"n")
    if isinstance(payload, bool):
        return _hash_int(int(payload))
    if isinstance(payload, int):
        return _hash_int(payload)
    if isinstance(payload, float):
        # integral floats compare equal to ints, so they must hash alike
        if payload == int(payload):
            return _hash_int(int(payload))
        return _fnv(_fnv(_FNV_OFFSET, b"f"), struct.pack("<d", payload))
    if isinstance(payload, str):
        return _fnv(_fnv(_FNV_OFFSET, b"s"), payload.encode("utf-8"))
    if isinstance(payload, bytes):
        return _fnv(_fnv(_FNV_OFFSET, b"b"), payload)
    if isinstance(payload, tuple):
        h = _fnv(_FNV_OFFSET, b"t")
        for item in payload:
            h = (h * _FNV_PRIME + stable_hash(item)) & _MASK64
        return h
    raise TypeError(f"unhashable payload type for collection element: {type(payload).__name__}")


class Value:
    """An element with payload equality, stable hashing, and an optional tag."""

    __slots__ = ("payload", "tag", "_hash")

    def __init__(self, payload: object, tag: ElementTypeTag | None = None):
        self.payload = payload
        self.tag = tag
        self._hash = stable_hash(payload)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Value):
            return NotImplemented
        return self.payload == other.payload

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if self.tag is None:
            return f"Value({self.payload!r})"
        return f"Value({self.payload!r}, {self.tag.name})"


#: Distinguished null element (a real value, distinct from "absent").
NULL = Value(None)
