"""Allocation-site profiles for collection instrumentation.

Every instrumented collection is tied to an allocation site (an inlining
context chain such as ``Foo.bar(): 4`` or ``Foo.bar(): 10 > Foo.baz(): 4``).
This module defines the site identity, the per-site counter record, the
ten-bucket size classification, and the on-disk profile document
(``*.dsprof.json``).

Counter updates behave as atomic monotonic increments: concurrent recorders
may interleave freely and the final totals equal the number of events.
``serialize``/``parse``/``merge`` assume quiescence (exclusive access).
"""

from __future__ import annotations

import json
import threading
from bisect import bisect_left
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterator


class ProfileError(Exception):
    """Misuse of the profiling API (unknown site, kind mismatch, ...)."""


class ProfileParseError(ProfileError):
    """A profile document that violates the on-disk schema."""


class DsKind(Enum):
    HASH_MAP = "HASH_MAP"
    LINKED_HASH_MAP = "LINKED_HASH_MAP"
    HASH_SET = "HASH_SET"
    ARRAY_LIST = "ARRAY_LIST"


class ElementTypeTag(IntEnum):
    """Element types distinguished for lists: 8 primitives plus objects.

    The value is the bit position in the serialized element-type mask.
    """

    BYTE = 0
    SHORT = 1
    INT = 2
    LONG = 3
    FLOAT = 4
    DOUBLE = 5
    CHAR = 6
    BOOLEAN = 7
    OBJECT = 8


PRIMITIVE_TAGS = frozenset(t for t in ElementTypeTag if t is not ElementTypeTag.OBJECT)

#: Inclusive upper size limits of the finite size classes, ascending.
SIZE_CLASS_BOUNDS = (0, 1, 2, 8, 16, 64, 256, 1024, 65536)


class SizeClass(IntEnum):
    """One of ten buckets classifying the maximum size an instance reached.

    Each class's bound is the inclusive upper size limit; ``INF`` has none.
    """

    C0 = 0
    C1 = 1
    C2 = 2
    C8 = 3
    C16 = 4
    C64 = 5
    C256 = 6
    C1024 = 7
    C65536 = 8
    INF = 9

    @property
    def bound(self) -> int | None:
        """Inclusive upper size limit, or None for the unbounded class."""
        if self is SizeClass.INF:
            return None
        return SIZE_CLASS_BOUNDS[self.value]

    @property
    def label(self) -> str:
        return "inf" if self is SizeClass.INF else str(self.bound)


def size_class_for(n: int) -> SizeClass:
    """Smallest size class whose bound covers ``n`` (INF above 65536)."""
    if n < 0:
        raise ValueError(f"size must be non-negative, got {n}")
    return SizeClass(bisect_left(SIZE_CLASS_BOUNDS, n))


@dataclass(frozen=True)
class SiteId:
    """Identity of an allocation site: the inlining context chain.

    ``frames`` lists ``(method_name, location_index)`` pairs, outermost
    first. Two sites are equal iff their frame chains are equal.
    """

    frames: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        if not self.frames:
            raise ValueError("an allocation site needs at least one frame")
        for method, index in self.frames:
            if not method:
                raise ValueError("frame method name must be non-empty")
            if " > " in method:
                # the rendered context joins frames with " > ", so a method
                # containing it would not parse back unambiguously
                raise ValueError(f"frame method name {method!r} contains the frame separator")
            if index < 0:
                raise ValueError(f"frame location index must be >= 0, got {index}")

    @classmethod
    def at(cls, method: str, index: int) -> SiteId:
        return cls(((method, index),))

    @classmethod
    def from_ctx(cls, ctx: str) -> SiteId:
        """Parse a rendered context string such as ``Foo.bar(): 10 > Foo.baz(): 4``."""
        frames = []
        for part in ctx.split(" > "):
            method, sep, index = part.rpartition(": ")
            if not sep or not index.isdigit():
                raise ValueError(f"malformed context frame {part!r} in {ctx!r}")
            frames.append((method, int(index)))
        return cls(tuple(frames))

    @property
    def ctx(self) -> str:
        return " > ".join(f"{method}: {index}" for method, index in self.frames)

    def __str__(self) -> str:
        return self.ctx


class SiteProfile:
    """Counters for a single allocation site.

    ``size_class_counts`` tracks, per class, how many instances currently
    have their maximum-ever size in that class; instances move between
    classes only when a size increase crosses a class boundary, so the
    counts always sum to ``allocations`` at quiescence.
    """

    __slots__ = (
        "kind",
        "allocations",
        "max_size",
        "size_class_counts",
        "gets",
        "inserts",
        "entry_accesses",
        "element_type_mask",
        "_lock",
    )

    def __init__(self, kind: DsKind):
        self.kind = kind
        self.allocations = 0
        self.max_size = 0
        self.size_class_counts = [0] * len(SizeClass)
        self.gets = 0
        self.inserts = 0
        self.entry_accesses = 0
        self.element_type_mask = 0
        self._lock = threading.Lock()

    def element_types(self) -> frozenset[ElementTypeTag]:
        return frozenset(t for t in ElementTypeTag if self.element_type_mask & (1 << t))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SiteProfile):
            return NotImplemented
        return (
            self.kind is other.kind
            and self.allocations == other.allocations
            and self.max_size == other.max_size
            and self.size_class_counts == other.size_class_counts
            and self.gets == other.gets
            and self.inserts == other.inserts
            and self.entry_accesses == other.entry_accesses
            and self.element_type_mask == other.element_type_mask
        )

    def __repr__(self) -> str:
        return (
            f"SiteProfile(kind={self.kind.name}, allocations={self.allocations}, "
            f"max_size={self.max_size}, gets={self.gets}, inserts={self.inserts}, "
            f"entry_accesses={self.entry_accesses})"
        )


class ProfileStore:
    """All site profiles of one run, keyed by allocation site."""

    def __init__(self) -> None:
        self._entries: dict[SiteId, SiteProfile] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProfileStore):
            return NotImplemented
        return self._entries == other._entries

    def sites(self) -> list[SiteId]:
        return sorted(self._entries, key=lambda s: s.ctx)

    def items(self) -> Iterator[tuple[SiteId, SiteProfile]]:
        return iter(self._entries.items())

    def get(self, site: SiteId) -> SiteProfile | None:
        return self._entries.get(site)

    def require(self, site: SiteId) -> SiteProfile:
        profile = self._entries.get(site)
        if profile is None:
            raise ProfileError(f"unknown allocation site: {site.ctx}")
        return profile

    def _get_or_create(self, site: SiteId, kind: DsKind) -> SiteProfile:
        with self._lock:
            profile = self._entries.get(site)
            if profile is None:
                profile = SiteProfile(kind)
                self._entries[site] = profile
        if profile.kind is not kind:
            raise ProfileError(
                f"site {site.ctx} is registered as {profile.kind.name}, not {kind.name}"
            )
        return profile


def record_allocation(store: ProfileStore, site: SiteId, kind: DsKind) -> None:
    """Count one allocation; the new instance starts in size class 0."""
    profile = store._get_or_create(site, kind)
    with profile._lock:
        profile.allocations += 1
        profile.size_class_counts[SizeClass.C0] += 1


def record_size_change(store: ProfileStore, site: SiteId, prev_size: int, new_size: int) -> None:
    """Track a growth of an instance's maximum size from ``prev_size``.

    ``prev_size`` must be the instance's previous maximum. Shrinking never
    moves an instance between classes, so callers only report new maxima.
    """
    profile = store.require(site)
    prev_class = size_class_for(prev_size)
    new_class = size_class_for(new_size)
    with profile._lock:
        if new_size > profile.max_size:
            profile.max_size = new_size
        if new_class > prev_class:
            if profile.size_class_counts[prev_class] == 0:
                raise ProfileError(
                    f"size-class counter underflow at {site.ctx}: "
                    f"no instance recorded in class {prev_class.label}"
                )
            profile.size_class_counts[prev_class] -= 1
            profile.size_class_counts[new_class] += 1


def record_get(store: ProfileStore, site: SiteId) -> None:
    profile = store.require(site)
    with profile._lock:
        profile.gets += 1


def record_insert(store: ProfileStore, site: SiteId) -> None:
    """Count a successful insert, i.e. one that grew the data structure."""
    profile = store.require(site)
    with profile._lock:
        profile.inserts += 1


def record_entry_access(store: ProfileStore, site: SiteId) -> None:
    profile = store.require(site)
    with profile._lock:
        profile.entry_accesses += 1


def record_element_type(store: ProfileStore, site: SiteId, tag: ElementTypeTag) -> None:
    profile = store.require(site)
    if profile.kind is not DsKind.ARRAY_LIST:
        raise ProfileError(
            f"element types are only tracked for lists; {site.ctx} is {profile.kind.name}"
        )
    with profile._lock:
        profile.element_type_mask |= 1 << tag


#: Order of the per-site counters in the serialized ``records`` array.
RECORD_FIELDS = (
    "allocations",
    "max_size",
    "gets",
    "inserts",
    "entry_accesses",
    "element_type_mask",
) + tuple(f"size_class_{c.label}" for c in SizeClass)

_RECORD_LEN = len(RECORD_FIELDS)


def _records_of(profile: SiteProfile) -> list[int]:
    return [
        profile.allocations,
        profile.max_size,
        profile.gets,
        profile.inserts,
        profile.entry_accesses,
        profile.element_type_mask,
        *profile.size_class_counts,
    ]


def serialize(store: ProfileStore) -> str:
    """Render the store as a JSON array, sorted by context for determinism."""
    documents = []
    for site in store.sites():
        profile = store.get(site)
        assert profile is not None
        documents.append(
            {"kind": profile.kind.value, "ctx": site.ctx, "records": _records_of(profile)}
        )
    return json.dumps(documents, indent=2)


def parse(document: str) -> ProfileStore:
    """Inverse of :func:`serialize`; raises ProfileParseError on schema violations."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ProfileParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, list):
        raise ProfileParseError("profile document must be a JSON array")

    store = ProfileStore()
    for position, item in enumerate(data):
        if not isinstance(item, dict):
            raise ProfileParseError(f"entry #{position} is not an object")
        ctx = item.get("ctx")
        if not isinstance(ctx, str):
            raise ProfileParseError(f"entry #{position} is missing a string 'ctx'")
        try:
            site = SiteId.from_ctx(ctx)
        except ValueError as exc:
            raise ProfileParseError(str(exc)) from exc
        kind_name = item.get("kind")
        try:
            kind = DsKind(kind_name)
        except ValueError:
            raise ProfileParseError(f"unknown kind {kind_name!r} for ctx {ctx!r}") from None
        records = item.get("records")
        if not isinstance(records, list) or len(records) != _RECORD_LEN:
            got = len(records) if isinstance(records, list) else type(records).__name__
            raise ProfileParseError(
                f"ctx {ctx!r}: expected {_RECORD_LEN} records, got {got}"
            )
        for name, value in zip(RECORD_FIELDS, records):
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ProfileParseError(f"ctx {ctx!r}: record {name!r} must be a counter >= 0")
        if records[5] >= 1 << len(ElementTypeTag):
            raise ProfileParseError(f"ctx {ctx!r}: element-type mask out of range")
        if store.get(site) is not None:
            raise ProfileParseError(f"duplicate ctx {ctx!r}")

        profile = SiteProfile(kind)
        (
            profile.allocations,
            profile.max_size,
            profile.gets,
            profile.inserts,
            profile.entry_accesses,
            profile.element_type_mask,
        ) = records[:6]
        profile.size_class_counts = list(records[6:])
        store._entries[site] = profile
    return store


def merge(a: ProfileStore, b: ProfileStore) -> ProfileStore:
    """Combine two stores from separate runs: counters sum, maxima combine."""
    merged = ProfileStore()
    for source in (a, b):
        for site, profile in source.items():
            existing = merged.get(site)
            if existing is None:
                existing = SiteProfile(profile.kind)
                merged._entries[site] = existing
            elif existing.kind is not profile.kind:
                raise ProfileError(
                    f"kind conflict for {site.ctx}: "
                    f"{existing.kind.name} vs {profile.kind.name}"
                )
            existing.allocations += profile.allocations
            existing.max_size = max(existing.max_size, profile.max_size)
            existing.gets += profile.gets
            existing.inserts += profile.inserts
            existing.entry_accesses += profile.entry_accesses
            existing.element_type_mask |= profile.element_type_mask
            for idx, count in enumerate(profile.size_class_counts):
                existing.size_class_counts[idx] += count
    return merged
