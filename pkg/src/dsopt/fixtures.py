"""Built-in workload fixtures.

Each fixture is a small deterministic workload engineered to trigger one
replacement path: mostly-empty maps, singleton maps with a 2 % oversize
drift, flat-array-sized maps, single-primitive lists, and set-dominated
allocation. Profiling runs default to half scale.
"""

from __future__ import annotations

from .profiles import DsKind, ElementTypeTag, SiteId
from .workload import Distribution, SiteWorkload, WorkloadSpec


def mostly_empty_maps() -> WorkloadSpec:
    return WorkloadSpec(
        name="mostly-empty-maps",
        seed=1101,
        sites=(
            SiteWorkload(
                site=SiteId.from_ctx("ConfigLoader.load(): 12"),
                kind=DsKind.HASH_MAP,
                instances=2000,
                sizes=Distribution((0, 1), (96.0, 4.0)),
                gets=Distribution.fixed(1),
            ),
            SiteWorkload(
                site=SiteId.from_ctx("RequestRouter.init(): 33"),
                kind=DsKind.LINKED_HASH_MAP,
                instances=400,
                sizes=Distribution((0, 1), (97.0, 3.0)),
            ),
        ),
    )


def singleton_with_drift() -> WorkloadSpec:
    """98 % of instances hold one pair; exactly 2 % receive a second key."""
    return WorkloadSpec(
        name="singleton-with-drift",
        seed=1102,
        sites=(
            SiteWorkload(
                site=SiteId.from_ctx("SessionCache.open(): 8"),
                kind=DsKind.HASH_MAP,
                instances=1000,
                sizes=Distribution((1, 2), (98.0, 2.0)),
                gets=Distribution.fixed(2),
            ),
        ),
    )


def large_economic_maps() -> WorkloadSpec:
    return WorkloadSpec(
        name="large-economic-maps",
        seed=1103,
        sites=(
            SiteWorkload(
                site=SiteId.from_ctx("MetricsRegistry.publish(): 21"),
                kind=DsKind.HASH_MAP,
                instances=300,
                sizes=Distribution((10, 20, 30, 40), (25.0, 25.0, 25.0, 25.0)),
                gets=Distribution.fixed(10),
                overwrites=Distribution.fixed(5),
            ),
            SiteWorkload(
                site=SiteId.from_ctx("AuditTrail.append(): 5"),
                kind=DsKind.LINKED_HASH_MAP,
                instances=200,
                sizes=Distribution.fixed(12),
                gets=Distribution.fixed(3),
            ),
        ),
    )


def int_lists() -> WorkloadSpec:
    return WorkloadSpec(
        name="int-lists",
        seed=1104,
        sites=(
            SiteWorkload(
                site=SiteId.from_ctx("TokenScanner.offsets(): 44"),
                kind=DsKind.ARRAY_LIST,
                instances=400,
                sizes=Distribution((8, 20), (50.0, 50.0)),
                gets=Distribution.fixed(4),
                element_tags=(ElementTypeTag.INT,),
            ),
            SiteWorkload(
                site=SiteId.from_ctx("EventLog.buffer(): 9"),
                kind=DsKind.ARRAY_LIST,
                instances=100,
                sizes=Distribution.fixed(6),
                element_tags=(ElementTypeTag.INT, ElementTypeTag.OBJECT),
            ),
        ),
    )


def set_heavy() -> WorkloadSpec:
    """Sets whose replacement also avoids the internal backing maps."""
    return WorkloadSpec(
        name="set-heavy",
        seed=1105,
        sites=(
            SiteWorkload(
                site=SiteId.from_ctx("TagIndex.collect(): 7"),
                kind=DsKind.HASH_SET,
                instances=500,
                sizes=Distribution.fixed(1),
                gets=Distribution.fixed(2),
            ),
            SiteWorkload(
                site=SiteId.from_ctx("VisitorRegistry.snapshot(): 3"),
                kind=DsKind.HASH_SET,
                instances=200,
                sizes=Distribution.fixed(20),
                gets=Distribution.fixed(5),
            ),
        ),
    )


_BUILDERS = {
    "mostly-empty-maps": mostly_empty_maps,
    "singleton-with-drift": singleton_with_drift,
    "large-economic-maps": large_economic_maps,
    "int-lists": int_lists,
    "set-heavy": set_heavy,
}


def fixture_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILDERS))


def builtin_fixture(name: str) -> WorkloadSpec:
    try:
        return _BUILDERS[name]()
    except KeyError:
        known = ", ".join(fixture_names())
        raise KeyError(f"unknown fixture {name!r}; built-ins: {known}") from None


def all_fixtures() -> tuple[WorkloadSpec, ...]:
    return tuple(_BUILDERS[name]() for name in fixture_names())
