"""Shared instrumentation context for one run.

Bundles the site-profile store, the byte ledger, and the per-site fallback
counters so a collection instance needs a single handle. Collections built
with ``runtime=None`` run bare (no profiling, no byte accounting), which is
how internal fallback structures avoid re-registering their site.
"""

from __future__ import annotations

import threading

from .costmodel import (
    REF,
    AllocationLedger,
    Category,
    DEFAULT_CONSTANTS,
    LayoutConstants,
    TypeLayout,
    array_size,
    object_size,
)
from .profiles import ProfileStore, SiteId


class Runtime:
    def __init__(self, constants: LayoutConstants = DEFAULT_CONSTANTS):
        self.constants = constants
        self.profile = ProfileStore()
        self.ledger = AllocationLedger()
        self.fallbacks: dict[SiteId, int] = {}
        self._anonymous_fallbacks = 0
        self._fallback_lock = threading.Lock()
        self._object_sizes: dict[tuple[str, ...], int] = {}

    def object_bytes(self, fields: tuple[str, ...]) -> int:
        size = self._object_sizes.get(fields)
        if size is None:
            size = object_size(TypeLayout("<anon>", fields), self.constants)
            self._object_sizes[fields] = size
        return size

    def array_bytes(self, element: str, length: int) -> int:
        return array_size(element, length, self.constants)

    def charge(self, category: Category, nbytes: int) -> None:
        self.ledger.charge(category, nbytes)

    def charge_object(self, category: Category, fields: tuple[str, ...]) -> None:
        self.ledger.charge(category, self.object_bytes(fields))

    def charge_array(self, category: Category, element: str, length: int) -> None:
        self.ledger.charge(category, array_size(element, length, self.constants))

    def charge_element_object(self) -> None:
        """Charge one workload-created payload object (a small boxed holder)."""
        self.ledger.charge(Category.ELEMENT_DATA, self.object_bytes((REF,)))

    def count_fallback(self, site: SiteId | None) -> None:
        with self._fallback_lock:
            if site is None:
                self._anonymous_fallbacks += 1
            else:
                self.fallbacks[site] = self.fallbacks.get(site, 0) + 1

    def fallback_count(self, site: SiteId) -> int:
        return self.fallbacks.get(site, 0)
