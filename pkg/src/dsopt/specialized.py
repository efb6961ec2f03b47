"""Memory-efficient replacement collections.

Each replacement is API-equivalent to its baseline counterpart but with a
smaller layout (only its own declared fields). The fixed-size variants hold
up to 0, 1, or 2 elements directly in fields and run a three-state machine
(empty / cached / fallback): once the design envelope is violated, the
original baseline structure is allocated, all cached contents move into it,
and every later operation delegates. The flat-array map stores keys and
values alternately with no per-entry nodes; the open-addressing set stores
elements directly in one probed array; the primitive lists store unboxed
payloads in a primitive array and fall back on the first foreign element.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Iterator

from .baseline import BaselineLinkedMap, BaselineList, BaselineMap, BaselineSet, spread
from .costmodel import Category, REF
from .profiles import (
    DsKind,
    ElementTypeTag,
    PRIMITIVE_TAGS,
    SiteId,
    record_allocation,
    record_element_type,
    record_entry_access,
    record_get,
    record_insert,
    record_size_change,
)
from .runtime import Runtime
from .values import Value


class FallbackState(IntEnum):
    EMPTY = 0
    CACHED = 1
    FALLBACK = 2  # absorbing


#: Transient entry record materialized per entry-iteration step: two refs.
TRANSIENT_ENTRY_FIELDS = (REF, REF)


class _SpecializedBase:
    """Instrumentation plumbing shared by every replacement type."""

    KIND: DsKind
    CATEGORY: Category
    FIELDS: tuple[str, ...]

    def __init__(self, runtime: Runtime | None, site: SiteId | None):
        self._rt = runtime
        self._site = site
        self._max_seen = 0
        if runtime is not None:
            runtime.charge_object(self.CATEGORY, self.FIELDS)
            if site is not None:
                record_allocation(runtime.profile, site, self.KIND)

    def _record_insert(self, new_size: int) -> None:
        if self._rt is not None and self._site is not None:
            record_insert(self._rt.profile, self._site)
            if new_size > self._max_seen:
                record_size_change(self._rt.profile, self._site, self._max_seen, new_size)
        if new_size > self._max_seen:
            self._max_seen = new_size

    def _record_get(self) -> None:
        if self._rt is not None and self._site is not None:
            record_get(self._rt.profile, self._site)

    def _record_entry_access(self) -> None:
        if self._rt is not None and self._site is not None:
            record_entry_access(self._rt.profile, self._site)

    def _charge_transient_entry(self) -> None:
        if self._rt is not None:
            self._rt.charge_object(self.CATEGORY, TRANSIENT_ENTRY_FIELDS)


# ---------------------------------------------------------------------------
# fixed-size maps


class _FixedSizeMap(_SpecializedBase):
    """Map caching up to CAPACITY pairs in fields, with baseline fallback."""

    CAPACITY: int
    FALLBACK_CLS: type[BaselineMap] = BaselineMap

    def __init__(
        self,
        runtime: Runtime | None = None,
        site: SiteId | None = None,
        initial_capacity: int | None = None,
    ):
        # the capacity argument is accepted for constructor compatibility
        # but has no effect on a field-backed layout
        super().__init__(runtime, site)
        self._state = FallbackState.EMPTY
        self._keys: list[Value] = []
        self._values: list[Value] = []
        self._fallback: BaselineMap | None = None

    @property
    def state(self) -> FallbackState:
        return self._state

    @property
    def fell_back(self) -> bool:
        return self._state is FallbackState.FALLBACK

    def size(self) -> int:
        if self._state is FallbackState.FALLBACK:
            assert self._fallback is not None
            return self._fallback.size()
        return len(self._keys)

    def __len__(self) -> int:
        return self.size()

    def init_fallback(self) -> None:
        """Allocate the original type, move cached pairs, delegate forever."""
        assert self._state is not FallbackState.FALLBACK
        fallback = self.FALLBACK_CLS(self._rt, None)
        for key, value in zip(self._keys, self._values):
            fallback.put(key, value)
        self._keys.clear()
        self._values.clear()
        self._fallback = fallback
        self._state = FallbackState.FALLBACK
        if self._rt is not None:
            self._rt.count_fallback(self._site)

    def put(self, key: Value, value: Value) -> Value | None:
        if self._state is not FallbackState.FALLBACK:
            keys = self._keys
            for i, cached in enumerate(keys):
                if cached == key:
                    previous = self._values[i]
                    self._values[i] = value
                    return previous
            if len(keys) < self.CAPACITY:
                keys.append(key)
                self._values.append(value)
                self._state = FallbackState.CACHED
                self._record_insert(len(keys))
                return None
            self.init_fallback()
        assert self._fallback is not None
        previous = self._fallback.put(key, value)
        if previous is None:
            self._record_insert(self._fallback.size())
        return previous

    def get(self, key: Value) -> Value | None:
        self._record_get()
        if self._state is FallbackState.FALLBACK:
            assert self._fallback is not None
            return self._fallback.get(key)
        for i, cached in enumerate(self._keys):
            if cached == key:
                return self._values[i]
        return None

    def remove(self, key: Value) -> Value | None:
        if self._state is FallbackState.FALLBACK:
            assert self._fallback is not None
            return self._fallback.remove(key)
        for i, cached in enumerate(self._keys):
            if cached == key:
                if len(self._keys) > 1:
                    del self._keys[i]
                    return self._values.pop(i)
                # removing the last pair would leave CACHED empty, which the
                # state machine forbids; resolve through the fallback instead
                self.init_fallback()
                assert self._fallback is not None
                return self._fallback.remove(key)
        return None

    def entries(self) -> Iterator[tuple[Value, Value]]:
        if self._state is FallbackState.FALLBACK:
            assert self._fallback is not None
            for pair in self._fallback.entries():
                self._record_entry_access()
                yield pair
        else:
            for i in range(len(self._keys)):
                self._record_entry_access()
                self._charge_transient_entry()
                yield self._keys[i], self._values[i]


class EmptyMap(_FixedSizeMap):
    KIND = DsKind.HASH_MAP
    CATEGORY = Category.HASH_MAP
    FIELDS = ("byte", REF)  # state, fallback
    CAPACITY = 0


class SingletonMap(_FixedSizeMap):
    KIND = DsKind.HASH_MAP
    CATEGORY = Category.HASH_MAP
    FIELDS = (REF, REF, "byte", REF)  # cached key, cached value, state, fallback
    CAPACITY = 1


class Size2Map(_FixedSizeMap):
    KIND = DsKind.HASH_MAP
    CATEGORY = Category.HASH_MAP
    FIELDS = (REF, REF, REF, REF, "byte", REF)  # two pairs, state, fallback
    CAPACITY = 2


class EmptyLinkedMap(EmptyMap):
    KIND = DsKind.LINKED_HASH_MAP
    CATEGORY = Category.LINKED_HASH_MAP
    FALLBACK_CLS = BaselineLinkedMap


class SingletonLinkedMap(SingletonMap):
    KIND = DsKind.LINKED_HASH_MAP
    CATEGORY = Category.LINKED_HASH_MAP
    FALLBACK_CLS = BaselineLinkedMap


class Size2LinkedMap(Size2Map):
    KIND = DsKind.LINKED_HASH_MAP
    CATEGORY = Category.LINKED_HASH_MAP
    FALLBACK_CLS = BaselineLinkedMap


# ---------------------------------------------------------------------------
# flat-array map


class EconomicMap(_SpecializedBase):
    """Map storing keys and values alternately in one flat array.

    No per-entry nodes are ever allocated; iteration follows insertion
    order. Lookups scan linearly up to LINEAR_SCAN_MAX entries, after which
    an auxiliary hash-index array is maintained. Index entries hold pair
    positions, so their width follows the capacity (one byte up to 256
    pairs, wider beyond); small maps are the intended use.
    """

    KIND = DsKind.HASH_MAP
    CATEGORY = Category.HASH_MAP
    FIELDS = (REF, REF, "int")  # storage, hash index, size
    LINEAR_SCAN_MAX = 8
    DEFAULT_CAPACITY = 4  # pairs; storage is allocated lazily

    def __init__(
        self,
        runtime: Runtime | None = None,
        site: SiteId | None = None,
        initial_capacity: int | None = None,
    ):
        super().__init__(runtime, site)
        # constructor arguments pass through: a requested capacity is used as-is
        self._initial_capacity = (
            self.DEFAULT_CAPACITY if initial_capacity is None else max(initial_capacity, 1)
        )
        self._capacity = 0  # in pairs
        self._flat: list[Value] = []  # keys at even slots, values at odd
        self._index: dict[Value, int] | None = None

    @property
    def fell_back(self) -> bool:
        return False

    def size(self) -> int:
        return len(self._flat) // 2

    def __len__(self) -> int:
        return self.size()

    @property
    def pair_capacity(self) -> int:
        return self._capacity

    def _index_entry_kind(self) -> str:
        if self._capacity <= 256:
            return "byte"
        if self._capacity <= 65536:
            return "short"
        return "int"

    def _grow(self, needed_pairs: int) -> None:
        if needed_pairs <= self._capacity:
            return
        new_capacity = self._initial_capacity if self._capacity == 0 else self._capacity * 2
        while new_capacity < needed_pairs:
            new_capacity *= 2
        self._capacity = new_capacity
        if self._rt is not None:
            self._rt.charge_array(self.CATEGORY, REF, 2 * new_capacity)
            if self._index is not None:
                self._rt.charge_array(self.CATEGORY, self._index_entry_kind(), 2 * new_capacity)

    def _build_index(self) -> None:
        self._index = {self._flat[i]: i for i in range(0, len(self._flat), 2)}
        if self._rt is not None:
            self._rt.charge_array(self.CATEGORY, self._index_entry_kind(), 2 * self._capacity)

    def _find(self, key: Value) -> int:
        """Flat index of the key slot, or -1."""
        if self._index is not None:
            return self._index.get(key, -1)
        for i in range(0, len(self._flat), 2):
            if self._flat[i] == key:
                return i
        return -1

    def put(self, key: Value, value: Value) -> Value | None:
        i = self._find(key)
        if i >= 0:
            previous = self._flat[i + 1]
            self._flat[i + 1] = value
            return previous
        self._grow(self.size() + 1)
        position = len(self._flat)
        self._flat.append(key)
        self._flat.append(value)
        if self._index is not None:
            self._index[key] = position
        elif self.size() > self.LINEAR_SCAN_MAX:
            self._build_index()
        self._record_insert(self.size())
        return None

    def get(self, key: Value) -> Value | None:
        self._record_get()
        i = self._find(key)
        return None if i < 0 else self._flat[i + 1]

    def remove(self, key: Value) -> Value | None:
        i = self._find(key)
        if i < 0:
            return None
        previous = self._flat[i + 1]
        del self._flat[i : i + 2]  # compact in place; later pairs shift down
        if self._index is not None:
            self._index = {self._flat[j]: j for j in range(0, len(self._flat), 2)}
        return previous

    def entries(self) -> Iterator[tuple[Value, Value]]:
        flat = self._flat
        for i in range(0, len(flat), 2):
            self._record_entry_access()
            self._charge_transient_entry()
            yield flat[i], flat[i + 1]


class EconomicLinkedMap(EconomicMap):
    # insertion-order iteration is native to the flat array
    KIND = DsKind.LINKED_HASH_MAP
    CATEGORY = Category.LINKED_HASH_MAP


# ---------------------------------------------------------------------------
# sets


class OpenSet(_SpecializedBase):
    """Open-addressing, linear-probing set over a single object array."""

    KIND = DsKind.HASH_SET
    CATEGORY = Category.HASH_SET
    FIELDS = (REF, "int", "int")  # slot array, size, tombstone count
    LOAD_FACTOR = 0.75
    DEFAULT_CAPACITY = 16

    _TOMBSTONE = object()

    def __init__(
        self,
        runtime: Runtime | None = None,
        site: SiteId | None = None,
        initial_capacity: int | None = None,
    ):
        super().__init__(runtime, site)
        requested = self.DEFAULT_CAPACITY if initial_capacity is None else initial_capacity
        capacity = 1
        while capacity < max(requested, 4):
            capacity <<= 1
        self._initial_slots = capacity
        self._slots: list[object] | None = None
        self._size = 0
        self._tombstones = 0

    @property
    def fell_back(self) -> bool:
        return False

    def size(self) -> int:
        return self._size

    def __len__(self) -> int:
        return self._size

    @property
    def slot_capacity(self) -> int:
        return 0 if self._slots is None else len(self._slots)

    def _alloc_slots(self, capacity: int) -> list[object]:
        if self._rt is not None:
            self._rt.charge_array(self.CATEGORY, REF, capacity)
        return [None] * capacity

    def _rehash(self) -> None:
        assert self._slots is not None
        old_slots = self._slots
        new_slots = self._alloc_slots(len(old_slots) * 2)
        mask = len(new_slots) - 1
        for slot in old_slots:
            if slot is None or slot is self._TOMBSTONE:
                continue
            i = spread(hash(slot)) & mask
            while new_slots[i] is not None:
                i = (i + 1) & mask
            new_slots[i] = slot
        self._slots = new_slots
        self._tombstones = 0

    def add(self, element: Value) -> bool:
        if self._slots is None:
            self._slots = self._alloc_slots(self._initial_slots)
        slots = self._slots
        mask = len(slots) - 1
        i = spread(hash(element)) & mask
        insert_at = -1
        while True:
            slot = slots[i]
            if slot is None:
                break
            if slot is self._TOMBSTONE:
                if insert_at < 0:
                    insert_at = i
            elif slot == element:
                return False
            i = (i + 1) & mask
        if insert_at < 0:
            insert_at = i
        elif slots[insert_at] is self._TOMBSTONE:
            self._tombstones -= 1
        slots[insert_at] = element
        self._size += 1
        self._record_insert(self._size)
        if self._size + self._tombstones > int(len(slots) * self.LOAD_FACTOR):
            self._rehash()
        return True

    def _probe(self, element: Value) -> int:
        if self._slots is None:
            return -1
        slots = self._slots
        mask = len(slots) - 1
        i = spread(hash(element)) & mask
        while True:
            slot = slots[i]
            if slot is None:
                return -1
            if slot is not self._TOMBSTONE and slot == element:
                return i
            i = (i + 1) & mask

    def contains(self, element: Value) -> bool:
        return self._probe(element) >= 0

    def __contains__(self, element: Value) -> bool:
        return self._probe(element) >= 0

    def remove(self, element: Value) -> bool:
        i = self._probe(element)
        if i < 0:
            return False
        assert self._slots is not None
        self._slots[i] = self._TOMBSTONE
        self._size -= 1
        self._tombstones += 1
        return True

    def __iter__(self) -> Iterator[Value]:
        # slot order, not insertion order
        if self._slots is not None:
            for slot in self._slots:
                if slot is not None and slot is not self._TOMBSTONE:
                    assert isinstance(slot, Value)
                    yield slot


class _FixedSizeSet(_SpecializedBase):
    """Set caching up to CAPACITY elements in fields, with baseline fallback."""

    CAPACITY: int
    KIND = DsKind.HASH_SET
    CATEGORY = Category.HASH_SET
    FALLBACK_CLS = BaselineSet

    def __init__(
        self,
        runtime: Runtime | None = None,
        site: SiteId | None = None,
        initial_capacity: int | None = None,
    ):
        super().__init__(runtime, site)
        self._state = FallbackState.EMPTY
        self._elements: list[Value] = []
        self._fallback: BaselineSet | None = None

    @property
    def state(self) -> FallbackState:
        return self._state

    @property
    def fell_back(self) -> bool:
        return self._state is FallbackState.FALLBACK

    def size(self) -> int:
        if self._state is FallbackState.FALLBACK:
            assert self._fallback is not None
            return self._fallback.size()
        return len(self._elements)

    def __len__(self) -> int:
        return self.size()

    def init_fallback(self) -> None:
        assert self._state is not FallbackState.FALLBACK
        fallback = self.FALLBACK_CLS(self._rt, None)
        for element in self._elements:
            fallback.add(element)
        self._elements.clear()
        self._fallback = fallback
        self._state = FallbackState.FALLBACK
        if self._rt is not None:
            self._rt.count_fallback(self._site)

    def add(self, element: Value) -> bool:
        if self._state is not FallbackState.FALLBACK:
            if element in self._elements:
                return False
            if len(self._elements) < self.CAPACITY:
                self._elements.append(element)
                self._state = FallbackState.CACHED
                self._record_insert(len(self._elements))
                return True
            self.init_fallback()
        assert self._fallback is not None
        added = self._fallback.add(element)
        if added:
            self._record_insert(self._fallback.size())
        return added

    def contains(self, element: Value) -> bool:
        if self._state is FallbackState.FALLBACK:
            assert self._fallback is not None
            return self._fallback.contains(element)
        return element in self._elements

    def __contains__(self, element: Value) -> bool:
        return self.contains(element)

    def remove(self, element: Value) -> bool:
        if self._state is FallbackState.FALLBACK:
            assert self._fallback is not None
            return self._fallback.remove(element)
        try:
            i = self._elements.index(element)
        except ValueError:
            return False
        if len(self._elements) > 1:
            del self._elements[i]
            return True
        self.init_fallback()
        assert self._fallback is not None
        return self._fallback.remove(element)

    def __iter__(self) -> Iterator[Value]:
        if self._state is FallbackState.FALLBACK:
            assert self._fallback is not None
            return iter(self._fallback)
        return iter(list(self._elements))


class FixedSet0(_FixedSizeSet):
    FIELDS = ("byte", REF)
    CAPACITY = 0


class FixedSet1(_FixedSizeSet):
    FIELDS = (REF, "byte", REF)
    CAPACITY = 1


class FixedSet2(_FixedSizeSet):
    FIELDS = (REF, REF, "byte", REF)
    CAPACITY = 2


# ---------------------------------------------------------------------------
# lists


class _FixedSizeList(_SpecializedBase):
    """List caching up to CAPACITY elements in fields, with baseline fallback.

    Elements live in reference fields, so primitive-tagged values still box.
    """

    CAPACITY: int
    KIND = DsKind.ARRAY_LIST
    CATEGORY = Category.ARRAY_LIST
    FALLBACK_CLS = BaselineList

    def __init__(
        self,
        runtime: Runtime | None = None,
        site: SiteId | None = None,
        initial_capacity: int | None = None,
    ):
        super().__init__(runtime, site)
        self._state = FallbackState.EMPTY
        self._elements: list[Value] = []
        self._fallback: BaselineList | None = None

    @property
    def state(self) -> FallbackState:
        return self._state

    @property
    def fell_back(self) -> bool:
        return self._state is FallbackState.FALLBACK

    def size(self) -> int:
        if self._state is FallbackState.FALLBACK:
            assert self._fallback is not None
            return self._fallback.size()
        return len(self._elements)

    def __len__(self) -> int:
        return self.size()

    def _record_element(self, value: Value) -> None:
        if self._rt is not None and self._site is not None:
            tag = value.tag if value.tag is not None else ElementTypeTag.OBJECT
            record_element_type(self._rt.profile, self._site, tag)

    def _charge_box(self, value: Value) -> None:
        if self._rt is not None and value.tag in PRIMITIVE_TAGS:
            header = self._rt.constants.object_header_bytes
            width = self._rt.constants.primitive_widths[value.tag.name.lower()]
            self._rt.charge(Category.ELEMENT_DATA, self._rt.constants.align(header + width))

    def init_fallback(self) -> None:
        assert self._state is not FallbackState.FALLBACK
        fallback = self.FALLBACK_CLS(self._rt, None)
        for element in self._elements:
            # elements were boxed when first stored; moving references is free
            fallback.add(element, _charge_box=False)
        self._elements.clear()
        self._fallback = fallback
        self._state = FallbackState.FALLBACK
        if self._rt is not None:
            self._rt.count_fallback(self._site)

    def add(self, value: Value) -> None:
        self._record_element(value)
        if self._state is not FallbackState.FALLBACK:
            if len(self._elements) < self.CAPACITY:
                self._charge_box(value)
                self._elements.append(value)
                self._state = FallbackState.CACHED
                self._record_insert(len(self._elements))
                return
            self.init_fallback()
        assert self._fallback is not None
        self._fallback.add(value)
        self._record_insert(self._fallback.size())

    def _check_index(self, index: int) -> None:
        if not 0 <= index < len(self._elements):
            raise IndexError(f"index {index} out of range for size {len(self._elements)}")

    def get_at(self, index: int) -> Value:
        if self._state is FallbackState.FALLBACK:
            assert self._fallback is not None
            return self._fallback.get_at(index)
        self._check_index(index)
        return self._elements[index]

    def set_at(self, index: int, value: Value) -> Value:
        if self._state is FallbackState.FALLBACK:
            assert self._fallback is not None
            return self._fallback.set_at(index, value)
        self._check_index(index)
        self._charge_box(value)
        previous = self._elements[index]
        self._elements[index] = value
        return previous

    def remove_at(self, index: int) -> Value:
        if self._state is FallbackState.FALLBACK:
            assert self._fallback is not None
            return self._fallback.remove_at(index)
        self._check_index(index)
        if len(self._elements) > 1:
            return self._elements.pop(index)
        self.init_fallback()
        assert self._fallback is not None
        return self._fallback.remove_at(index)

    def __iter__(self) -> Iterator[Value]:
        if self._state is FallbackState.FALLBACK:
            assert self._fallback is not None
            return iter(self._fallback)
        return iter(list(self._elements))


class FixedList0(_FixedSizeList):
    FIELDS = ("byte", REF)
    CAPACITY = 0


class FixedList1(_FixedSizeList):
    FIELDS = (REF, "byte", REF)
    CAPACITY = 1


class FixedList2(_FixedSizeList):
    FIELDS = (REF, REF, "byte", REF)
    CAPACITY = 2


class PrimitiveList(_SpecializedBase):
    """List specialized to one primitive element type.

    Matching elements are stored unboxed in a primitive array. The first
    element of any other type forces a fallback to the baseline list, where
    all stored payloads are re-boxed. Reads return a value equal to the one
    stored, but not necessarily the same object.
    """

    KIND = DsKind.ARRAY_LIST
    CATEGORY = Category.ARRAY_LIST
    FIELDS = (REF, "int", REF)  # primitive storage, size, fallback
    DEFAULT_CAPACITY = 10
    GROWTH_NUMERATOR = 3
    GROWTH_DENOMINATOR = 2

    def __init__(
        self,
        runtime: Runtime | None = None,
        site: SiteId | None = None,
        tag: ElementTypeTag = ElementTypeTag.INT,
        initial_capacity: int | None = None,
    ):
        if tag not in PRIMITIVE_TAGS:
            raise ValueError(f"primitive lists require a primitive tag, got {tag.name}")
        super().__init__(runtime, site)
        self.tag = tag
        self._width_kind = tag.name.lower()
        self._payloads: list[object] = []
        self._capacity = 0
        self._initial_capacity = (
            self.DEFAULT_CAPACITY if initial_capacity is None else max(initial_capacity, 1)
        )
        self._fallback: BaselineList | None = None

    @property
    def fell_back(self) -> bool:
        return self._fallback is not None

    def size(self) -> int:
        if self._fallback is not None:
            return self._fallback.size()
        return len(self._payloads)

    def __len__(self) -> int:
        return self.size()

    @property
    def capacity(self) -> int:
        return self._capacity

    def _ensure_capacity(self, needed: int) -> None:
        if needed <= self._capacity:
            return
        if self._capacity == 0:
            new_capacity = max(self._initial_capacity, needed)
        else:
            new_capacity = self._capacity * self.GROWTH_NUMERATOR // self.GROWTH_DENOMINATOR
            if new_capacity < needed:
                new_capacity = needed
        self._capacity = new_capacity
        if self._rt is not None:
            self._rt.charge_array(self.CATEGORY, self._width_kind, new_capacity)

    def init_fallback(self) -> None:
        assert self._fallback is None
        fallback = BaselineList(self._rt, None)
        for payload in self._payloads:
            # unboxed payloads must be re-boxed on the way out
            fallback.add(Value(payload, self.tag))
        self._payloads.clear()
        self._capacity = 0
        self._fallback = fallback
        if self._rt is not None:
            self._rt.count_fallback(self._site)

    def _record_element(self, value: Value) -> None:
        if self._rt is not None and self._site is not None:
            tag = value.tag if value.tag is not None else ElementTypeTag.OBJECT
            record_element_type(self._rt.profile, self._site, tag)

    def add(self, value: Value) -> None:
        self._record_element(value)
        if self._fallback is None:
            if value.tag is self.tag:
                self._ensure_capacity(len(self._payloads) + 1)
                self._payloads.append(value.payload)
                self._record_insert(len(self._payloads))
                return
            self.init_fallback()
        assert self._fallback is not None
        self._fallback.add(value)
        self._record_insert(self._fallback.size())

    def _check_index(self, index: int) -> None:
        if not 0 <= index < len(self._payloads):
            raise IndexError(f"index {index} out of range for size {len(self._payloads)}")

    def get_at(self, index: int) -> Value:
        if self._fallback is not None:
            return self._fallback.get_at(index)
        self._check_index(index)
        return Value(self._payloads[index], self.tag)

    def set_at(self, index: int, value: Value) -> Value:
        if self._fallback is not None:
            return self._fallback.set_at(index, value)
        self._check_index(index)
        if value.tag is not self.tag:
            self.init_fallback()
            assert self._fallback is not None
            return self._fallback.set_at(index, value)
        previous = Value(self._payloads[index], self.tag)
        self._payloads[index] = value.payload
        return previous

    def remove_at(self, index: int) -> Value:
        if self._fallback is not None:
            return self._fallback.remove_at(index)
        self._check_index(index)
        return Value(self._payloads.pop(index), self.tag)

    def __iter__(self) -> Iterator[Value]:
        if self._fallback is not None:
            return iter(self._fallback)
        tag = self.tag
        return iter([Value(payload, tag) for payload in self._payloads])
