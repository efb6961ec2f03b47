"""Deterministic byte accounting for modeled heap allocations.

Object and array sizes are computed from declared field layouts under a
configurable set of layout constants (64-bit managed heap, uncompressed
references by default). Every modeled allocation charges its size to an
:class:`AllocationLedger` under a data-structure category; the ledger's
"total allocated bytes" is the artifact's measurement substitute.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping

#: Field kind marker for reference-typed fields; primitives use their name.
REF = "ref"

_DEFAULT_PRIMITIVE_WIDTHS: Mapping[str, int] = MappingProxyType(
    {
        "byte": 1,
        "boolean": 1,
        "short": 2,
        "char": 2,
        "int": 4,
        "float": 4,
        "long": 8,
        "double": 8,
    }
)


class LayoutError(ValueError):
    """Invalid layout constants or an unknown field kind."""


@dataclass(frozen=True)
class LayoutConstants:
    object_header_bytes: int = 16
    array_header_bytes: int = 24  # includes the length field
    reference_bytes: int = 8
    primitive_widths: Mapping[str, int] = field(default=_DEFAULT_PRIMITIVE_WIDTHS)
    alignment_bytes: int = 8

    def __post_init__(self) -> None:
        sizes = (
            self.object_header_bytes,
            self.array_header_bytes,
            self.reference_bytes,
            self.alignment_bytes,
            *self.primitive_widths.values(),
        )
        if any(n <= 0 for n in sizes):
            raise LayoutError("all layout constants must be positive")
        if self.alignment_bytes & (self.alignment_bytes - 1):
            raise LayoutError("alignment must be a power of two")

    def field_width(self, kind: str) -> int:
        if kind == REF:
            return self.reference_bytes
        try:
            return self.primitive_widths[kind]
        except KeyError:
            raise LayoutError(f"unknown field kind {kind!r}") from None

    def align(self, nbytes: int) -> int:
        a = self.alignment_bytes
        return (nbytes + a - 1) // a * a


DEFAULT_CONSTANTS = LayoutConstants()


@dataclass(frozen=True)
class TypeLayout:
    """Named object layout: an ordered list of field kinds."""

    name: str
    fields: tuple[str, ...]


def object_size(layout: TypeLayout, constants: LayoutConstants = DEFAULT_CONSTANTS) -> int:
    """Header plus declared field widths, rounded up to alignment."""
    total = constants.object_header_bytes
    for kind in layout.fields:
        total += constants.field_width(kind)
    return constants.align(total)


def array_size(
    element: str, length: int, constants: LayoutConstants = DEFAULT_CONSTANTS
) -> int:
    """Array header plus ``length`` element widths, rounded up to alignment."""
    if length < 0:
        raise ValueError(f"array length must be >= 0, got {length}")
    return constants.align(constants.array_header_bytes + length * constants.field_width(element))


class Category(Enum):
    """Ledger categories for allocated bytes."""

    HASH_MAP = "HASH_MAP"
    LINKED_HASH_MAP = "LINKED_HASH_MAP"
    HASH_SET = "HASH_SET"
    ARRAY_LIST = "ARRAY_LIST"
    ELEMENT_DATA = "ELEMENT_DATA"
    OTHER = "OTHER"


@dataclass(frozen=True)
class CategoryTotal:
    count: int
    bytes: int


@dataclass(frozen=True)
class LedgerSnapshot:
    """Immutable point-in-time copy of an allocation ledger."""

    overall_bytes: int
    categories: Mapping[str, CategoryTotal]

    def category(self, category: Category | str) -> CategoryTotal:
        name = category.value if isinstance(category, Category) else category
        return self.categories[name]

    def to_json_dict(self) -> dict:
        return {
            "overall": self.overall_bytes,
            "categories": {
                name: {"count": total.count, "bytes": total.bytes}
                for name, total in self.categories.items()
            },
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> LedgerSnapshot:
        categories = {
            name: CategoryTotal(count=entry["count"], bytes=entry["bytes"])
            for name, entry in data["categories"].items()
        }
        return cls(overall_bytes=data["overall"], categories=MappingProxyType(categories))


class AllocationLedger:
    """Running totals of allocation counts and bytes per category.

    Charges tolerate concurrent callers; snapshots are consistent copies.
    """

    def __init__(self) -> None:
        self._counts = {category: 0 for category in Category}
        self._bytes = {category: 0 for category in Category}
        self._lock = threading.Lock()

    def charge(self, category: Category, nbytes: int) -> None:
        if nbytes < 0:
            raise ValueError(f"cannot charge a negative size: {nbytes}")
        with self._lock:
            self._counts[category] += 1
            self._bytes[category] += nbytes

    def snapshot(self) -> LedgerSnapshot:
        with self._lock:
            categories = {
                category.value: CategoryTotal(self._counts[category], self._bytes[category])
                for category in Category
            }
        overall = sum(total.bytes for total in categories.values())
        return LedgerSnapshot(overall_bytes=overall, categories=MappingProxyType(categories))
