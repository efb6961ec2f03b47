"""Profile-guided collection specialization toolkit.

Instrumented baseline collections produce per-allocation-site profiles; a
heuristic engine picks memory-efficient replacement implementations per
site; a deterministic cost model and a workload harness quantify the
allocated-byte reduction end to end.
"""

from .baseline import (
    BaselineLinkedMap,
    BaselineList,
    BaselineMap,
    BaselineSet,
    DUMMY,
)
from .costmodel import (
    REF,
    AllocationLedger,
    Category,
    DEFAULT_CONSTANTS,
    LayoutConstants,
    LedgerSnapshot,
    TypeLayout,
    array_size,
    object_size,
)
from .engine import (
    DecisionKind,
    EngineError,
    PlanEntry,
    PolicyConfig,
    ReplacementDecision,
    ReplacementPlan,
    build_plan,
    decide_list,
    decide_map,
    decide_set,
    plan_parse,
    plan_serialize,
    replacement_type_name,
    site_factory,
)
from .fixtures import all_fixtures, builtin_fixture, fixture_names
from .ir import (
    DEFAULT_CATALOG,
    IrError,
    IrGraph,
    IrNode,
    NodeKind,
    TypeCatalog,
    apply_plan,
    dump,
    parse_graph,
    rewrite_allocation,
)
from .pipeline import (
    check_spec_profile_alignment,
    run_instrumented,
    run_optimized,
    run_with_plan,
)
from .profiles import (
    DsKind,
    ElementTypeTag,
    PRIMITIVE_TAGS,
    ProfileError,
    ProfileParseError,
    ProfileStore,
    SiteId,
    SiteProfile,
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
from .reports import (
    ComparisonReport,
    RunReport,
    compare,
    histogram,
    render_histogram_text,
)
from .runtime import Runtime
from .specialized import (
    EconomicLinkedMap,
    EconomicMap,
    EmptyLinkedMap,
    EmptyMap,
    FallbackState,
    FixedList0,
    FixedList1,
    FixedList2,
    FixedSet0,
    FixedSet1,
    FixedSet2,
    OpenSet,
    PrimitiveList,
    Size2LinkedMap,
    Size2Map,
    SingletonLinkedMap,
    SingletonMap,
)
from .values import NULL, Value, stable_hash
from .workload import Distribution, SiteWorkload, WorkloadError, WorkloadSpec, execute

__version__ = "0.1.0"
