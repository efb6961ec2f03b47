"""Baseline collection models: entry-chained hash map, its linked variant,
a map-backed set, and a boxed growable list.

These mirror the memory behavior of the conventional implementations: the
map allocates a 16-slot table on the first insert and doubles it past the
0.75 load threshold; every mapping lives in a chained entry node; the set
delegates to an internal map with a shared dummy value; the list stores
references and boxes primitive-tagged elements.

Instances are single-owner and single-threaded; only their profile/ledger
side effects are safe under concurrency.
"""

from __future__ import annotations

from typing import Iterator

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

#: Shared dummy stored as the value of every set element's backing mapping.
DUMMY = Value("<present>")


def spread(h: int) -> int:
    """Mix high bits into the low ones before masking to a table index."""
    h &= 0xFFFFFFFF
    return (h ^ (h >> 16)) & 0xFFFFFFFF


def _table_capacity_for(requested: int) -> int:
    capacity = 1
    while capacity < requested:
        capacity <<= 1
    return max(capacity, 1)


class EntryNode:
    """Chained table entry holding the key, value, and cached hash."""

    __slots__ = ("hash", "key", "value", "next")
    FIELDS = ("int", REF, REF, REF)

    def __init__(self, h: int, key: Value, value: Value):
        self.hash = h
        self.key = key
        self.value = value
        self.next: EntryNode | None = None


class LinkedEntryNode(EntryNode):
    __slots__ = ("before", "after")
    FIELDS = EntryNode.FIELDS + (REF, REF)

    def __init__(self, h: int, key: Value, value: Value):
        super().__init__(h, key, value)
        self.before: LinkedEntryNode | None = None
        self.after: LinkedEntryNode | None = None


class BaselineMap:
    KIND = DsKind.HASH_MAP
    CATEGORY = Category.HASH_MAP
    # table ref, size, threshold, mod_count, and three view-cache refs;
    # the caches exist only for footprint fidelity and stay unused
    FIELDS = (REF, "int", "int", "int", REF, REF, REF)
    NODE_CLS = EntryNode
    DEFAULT_CAPACITY = 16
    LOAD_FACTOR = 0.75

    def __init__(
        self,
        runtime: Runtime | None = None,
        site: SiteId | None = None,
        initial_capacity: int | None = None,
    ):
        self._rt = runtime
        self._site = site
        self._table: list[EntryNode | None] | None = None
        self._capacity = (
            self.DEFAULT_CAPACITY
            if initial_capacity is None
            else _table_capacity_for(initial_capacity)
        )
        self._threshold = int(self._capacity * self.LOAD_FACTOR)
        self._size = 0
        self._max_seen = 0
        self.mod_count = 0
        if runtime is not None:
            runtime.charge_object(self.CATEGORY, self.FIELDS)
            if site is not None:
                record_allocation(runtime.profile, site, self.KIND)

    # -- internal helpers ----------------------------------------------

    def _alloc_table(self, capacity: int) -> list[EntryNode | None]:
        if self._rt is not None:
            self._rt.charge_array(self.CATEGORY, REF, capacity)
        return [None] * capacity

    def _new_node(self, h: int, key: Value, value: Value) -> EntryNode:
        if self._rt is not None:
            self._rt.charge_object(self.CATEGORY, self.NODE_CLS.FIELDS)
        return self.NODE_CLS(h, key, value)

    def _record_growth(self) -> None:
        if self._rt is not None and self._site is not None:
            record_insert(self._rt.profile, self._site)
            if self._size > self._max_seen:
                record_size_change(self._rt.profile, self._site, self._max_seen, self._size)
        if self._size > self._max_seen:
            self._max_seen = self._size

    def _resize(self) -> None:
        assert self._table is not None
        old_table = self._table
        self._capacity *= 2
        self._threshold = int(self._capacity * self.LOAD_FACTOR)
        new_table = self._alloc_table(self._capacity)
        mask = self._capacity - 1
        for head in old_table:
            node = head
            while node is not None:
                following = node.next
                node.next = None
                index = spread(node.hash) & mask
                tail = new_table[index]
                if tail is None:
                    new_table[index] = node
                else:
                    while tail.next is not None:
                        tail = tail.next
                    tail.next = node
                node = following
        self._table = new_table

    def _linked_hooks(self, node: EntryNode) -> None:
        pass

    def _unlink_hooks(self, node: EntryNode) -> None:
        pass

    # -- public API -----------------------------------------------------

    def size(self) -> int:
        return self._size

    def __len__(self) -> int:
        return self._size

    @property
    def fell_back(self) -> bool:
        return False

    def occupied_slots(self) -> int:
        if self._table is None:
            return 0
        return sum(1 for head in self._table if head is not None)

    @property
    def table_capacity(self) -> int | None:
        return None if self._table is None else len(self._table)

    def put(self, key: Value, value: Value) -> Value | None:
        if self._table is None:
            self._table = self._alloc_table(self._capacity)
        h = hash(key)
        index = spread(h) & (self._capacity - 1)
        node = self._table[index]
        last = None
        while node is not None:
            if node.hash == h and node.key == key:
                previous = node.value
                node.value = value
                return previous
            last = node
            node = node.next
        new_node = self._new_node(h, key, value)
        if last is None:
            self._table[index] = new_node
        else:
            last.next = new_node
        self._linked_hooks(new_node)
        self._size += 1
        self.mod_count += 1
        self._record_growth()
        if self._size > self._threshold:
            self._resize()
        return None

    def get(self, key: Value) -> Value | None:
        if self._rt is not None and self._site is not None:
            record_get(self._rt.profile, self._site)
        if self._table is None:
            return None
        h = hash(key)
        node = self._table[spread(h) & (self._capacity - 1)]
        while node is not None:
            if node.hash == h and node.key == key:
                return node.value
            node = node.next
        return None

    def remove(self, key: Value) -> Value | None:
        if self._table is None:
            return None
        h = hash(key)
        index = spread(h) & (self._capacity - 1)
        node = self._table[index]
        previous = None
        while node is not None:
            if node.hash == h and node.key == key:
                if previous is None:
                    self._table[index] = node.next
                else:
                    previous.next = node.next
                self._unlink_hooks(node)
                self._size -= 1
                self.mod_count += 1
                return node.value
            previous = node
            node = node.next
        return None

    def _nodes(self) -> Iterator[EntryNode]:
        if self._table is not None:
            for head in self._table:
                node = head
                while node is not None:
                    yield node
                    node = node.next

    def entries(self) -> Iterator[tuple[Value, Value]]:
        """Iterates (key, value) pairs; every step counts one entry access."""
        for node in self._nodes():
            if self._rt is not None and self._site is not None:
                record_entry_access(self._rt.profile, self._site)
            yield node.key, node.value


class BaselineLinkedMap(BaselineMap):
    """Insertion-ordered map variant; nodes carry two extra link references."""

    KIND = DsKind.LINKED_HASH_MAP
    CATEGORY = Category.LINKED_HASH_MAP
    FIELDS = BaselineMap.FIELDS + (REF, REF)  # head and tail of the link chain
    NODE_CLS = LinkedEntryNode

    def __init__(
        self,
        runtime: Runtime | None = None,
        site: SiteId | None = None,
        initial_capacity: int | None = None,
    ):
        self._head: LinkedEntryNode | None = None
        self._tail: LinkedEntryNode | None = None
        super().__init__(runtime, site, initial_capacity)

    def _linked_hooks(self, node: EntryNode) -> None:
        assert isinstance(node, LinkedEntryNode)
        if self._tail is None:
            self._head = self._tail = node
        else:
            node.before = self._tail
            self._tail.after = node
            self._tail = node

    def _unlink_hooks(self, node: EntryNode) -> None:
        assert isinstance(node, LinkedEntryNode)
        if node.before is None:
            self._head = node.after
        else:
            node.before.after = node.after
        if node.after is None:
            self._tail = node.before
        else:
            node.after.before = node.before
        node.before = node.after = None

    def _nodes(self) -> Iterator[EntryNode]:
        node = self._head
        while node is not None:
            yield node
            node = node.after


class BaselineSet:
    """Set backed by an internal map whose values are one shared dummy."""

    KIND = DsKind.HASH_SET
    CATEGORY = Category.HASH_SET
    FIELDS = (REF,)  # the backing-map reference

    def __init__(
        self,
        runtime: Runtime | None = None,
        site: SiteId | None = None,
        initial_capacity: int | None = None,
    ):
        self._rt = runtime
        self._site = site
        self._max_seen = 0
        if runtime is not None:
            runtime.charge_object(self.CATEGORY, self.FIELDS)
            if site is not None:
                record_allocation(runtime.profile, site, self.KIND)
        # the backing map charges to HASH_MAP but reports no site of its own
        self._map = BaselineMap(runtime, None, initial_capacity)

    def size(self) -> int:
        return self._map.size()

    def __len__(self) -> int:
        return self._map.size()

    @property
    def fell_back(self) -> bool:
        return False

    @property
    def backing_map(self) -> BaselineMap:
        return self._map

    def _record_growth(self) -> None:
        size = self._map.size()
        if self._rt is not None and self._site is not None:
            record_insert(self._rt.profile, self._site)
            if size > self._max_seen:
                record_size_change(self._rt.profile, self._site, self._max_seen, size)
        self._max_seen = max(self._max_seen, size)

    def add(self, element: Value) -> bool:
        added = self._map.put(element, DUMMY) is None
        if added:
            self._record_growth()
        return added

    def contains(self, element: Value) -> bool:
        # the backing map has no site, so this probe records nothing
        return self._map.get(element) is not None

    def __contains__(self, element: Value) -> bool:
        return self.contains(element)

    def remove(self, element: Value) -> bool:
        return self._map.remove(element) is not None

    def __iter__(self) -> Iterator[Value]:
        for node in self._map._nodes():
            yield node.key


class BaselineList:
    """Growable list over a reference array; primitive-tagged stores box."""

    KIND = DsKind.ARRAY_LIST
    CATEGORY = Category.ARRAY_LIST
    FIELDS = (REF, "int", "int")  # element array, size, mod_count
    DEFAULT_CAPACITY = 10
    GROWTH_NUMERATOR = 3  # grow by 1.5x
    GROWTH_DENOMINATOR = 2

    def __init__(
        self,
        runtime: Runtime | None = None,
        site: SiteId | None = None,
        initial_capacity: int | None = None,
    ):
        self._rt = runtime
        self._site = site
        self._elements: list[Value] = []
        self._capacity = 0
        self._initial_capacity = (
            self.DEFAULT_CAPACITY if initial_capacity is None else max(initial_capacity, 1)
        )
        self._max_seen = 0
        self.mod_count = 0
        if runtime is not None:
            runtime.charge_object(self.CATEGORY, self.FIELDS)
            if site is not None:
                record_allocation(runtime.profile, site, self.KIND)

    def size(self) -> int:
        return len(self._elements)

    def __len__(self) -> int:
        return len(self._elements)

    @property
    def fell_back(self) -> bool:
        return False

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
            self._rt.charge_array(self.CATEGORY, REF, new_capacity)

    def _charge_box(self, value: Value) -> None:
        if self._rt is not None and value.tag in PRIMITIVE_TAGS:
            header = self._rt.constants.object_header_bytes
            width = self._rt.constants.primitive_widths[value.tag.name.lower()]
            self._rt.charge(Category.ELEMENT_DATA, self._rt.constants.align(header + width))

    def _record_growth(self) -> None:
        size = len(self._elements)
        if self._rt is not None and self._site is not None:
            record_insert(self._rt.profile, self._site)
            if size > self._max_seen:
                record_size_change(self._rt.profile, self._site, self._max_seen, size)
        self._max_seen = max(self._max_seen, size)

    def add(self, value: Value, _charge_box: bool = True) -> None:
        self._ensure_capacity(len(self._elements) + 1)
        if _charge_box:
            self._charge_box(value)
        self._elements.append(value)
        self.mod_count += 1
        if self._rt is not None and self._site is not None:
            tag = value.tag if value.tag is not None else ElementTypeTag.OBJECT
            record_element_type(self._rt.profile, self._site, tag)
        self._record_growth()

    def _check_index(self, index: int) -> None:
        if not 0 <= index < len(self._elements):
            raise IndexError(f"index {index} out of range for size {len(self._elements)}")

    def get_at(self, index: int) -> Value:
        self._check_index(index)
        return self._elements[index]

    def set_at(self, index: int, value: Value) -> Value:
        self._check_index(index)
        self._charge_box(value)
        previous = self._elements[index]
        self._elements[index] = value
        return previous

    def remove_at(self, index: int) -> Value:
        self._check_index(index)
        self.mod_count += 1
        return self._elements.pop(index)

    def __iter__(self) -> Iterator[Value]:
        return iter(self._elements)
