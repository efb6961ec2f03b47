"""Acceptance suite.

Every test here implements one exit criterion end to end, at its stated
tolerance (exact equality unless noted), and prints one PASS line on
success (run with ``pytest tests/test_acceptance.py -v -s`` to see them).
Expected byte counts are derived by independent in-test arithmetic, never
by calling the code under test.
"""

from __future__ import annotations

import random
import time

from differential import (
    primitive_element_maker,
    run_list_differential,
    run_map_differential,
    run_set_differential,
)
from test_engine import _decide, make_profile, oracle_decide, random_profile

from dsopt.baseline import BaselineLinkedMap, BaselineList, BaselineMap, BaselineSet
from dsopt.costmodel import Category
from dsopt.engine import (
    DecisionKind,
    PolicyConfig,
    ReplacementDecision,
    build_plan,
    plan_parse,
    plan_serialize,
    primitive_list,
)
from dsopt.fixtures import all_fixtures, builtin_fixture
from dsopt.ir import apply_plan, dump, fig_style_example_graph
from dsopt.pipeline import run_instrumented, run_optimized, run_with_plan
from dsopt.profiles import (
    DsKind,
    ElementTypeTag,
    PRIMITIVE_TAGS,
    ProfileStore,
    SiteId,
    SizeClass,
    parse,
    serialize,
    size_class_for,
)
from dsopt.reports import compare
from dsopt.runtime import Runtime
from dsopt.specialized import (
    EconomicLinkedMap,
    EconomicMap,
    EmptyLinkedMap,
    EmptyMap,
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
from dsopt.values import Value


def _ok(criterion: int, message: str) -> None:
    print(f"PASS criterion {criterion}: {message}")


# independent layout arithmetic (never calls the cost model)
def _align8(n: int) -> int:
    return (n + 7) // 8 * 8


_HEADER, _AHEADER, _REF, _INT, _BYTE = 16, 24, 8, 4, 1


def test_criterion_1_motivating_example_arithmetic():
    started = time.time()
    map_object = _align8(_HEADER + _REF + 3 * _INT + 3 * _REF)          # 64
    table_16 = _align8(_AHEADER + 16 * _REF)                            # 152
    entry_node = _align8(_HEADER + _INT + 3 * _REF)                     # 48
    singleton_object = _align8(_HEADER + 3 * _REF + _BYTE)              # 48
    assert (map_object, table_16, entry_node, singleton_object) == (64, 152, 48, 48)

    rt = Runtime()
    site = SiteId.from_ctx("Foo.bar(): 4")
    m = BaselineMap(rt, site)
    m.put(Value("key"), Value("val"))
    assert m.occupied_slots() == 1
    assert m.table_capacity == 16  # 15 of the 16 slots stay unused
    baseline_bytes = rt.ledger.snapshot().category(Category.HASH_MAP).bytes
    assert baseline_bytes == map_object + table_16 + entry_node

    rt2 = Runtime()
    s = SingletonMap(rt2, site)
    s.put(Value("key"), Value("val"))
    replacement_bytes = rt2.ledger.snapshot().category(Category.HASH_MAP).bytes
    assert replacement_bytes == singleton_object
    assert replacement_bytes < baseline_bytes

    elapsed = time.time() - started
    assert elapsed < 1.0
    _ok(1, f"one-entry map charges {baseline_bytes} B vs {replacement_bytes} B "
           f"for the one-pair replacement ({elapsed:.3f}s)")


SEQUENCES = 100_000


def test_criterion_2_master_equivalence():
    started = time.time()
    checked = 0

    map_cases = [
        (EmptyMap, BaselineMap, False),
        (SingletonMap, BaselineMap, False),
        (Size2Map, BaselineMap, False),
        (EconomicMap, BaselineMap, False),
        (EmptyLinkedMap, BaselineLinkedMap, True),
        (SingletonLinkedMap, BaselineLinkedMap, True),
        (Size2LinkedMap, BaselineLinkedMap, True),
        (EconomicLinkedMap, BaselineLinkedMap, True),
    ]
    for spec_cls, base_cls, ordered in map_cases:
        run_map_differential(spec_cls, base_cls, SEQUENCES, seed=2001 + checked,
                             ordered=ordered)
        checked += 1

    for spec_cls in (FixedSet0, FixedSet1, FixedSet2, OpenSet):
        run_set_differential(spec_cls, BaselineSet, SEQUENCES, seed=3001 + checked)
        checked += 1

    for spec_cls in (FixedList0, FixedList1, FixedList2):
        run_list_differential(spec_cls, BaselineList, SEQUENCES, seed=4001 + checked)
        checked += 1

    # one parameterized type: its budget cycles through all eight tags
    tags = sorted(PRIMITIVE_TAGS, key=lambda t: t.value)
    per_tag = SEQUENCES // len(tags)
    for tag in tags:
        run_list_differential(
            lambda: PrimitiveList(tag=tag),
            BaselineList,
            per_tag,
            seed=5001 + tag.value,
            element_maker=primitive_element_maker(tag),
        )
    checked += 1

    elapsed = time.time() - started
    assert elapsed < 60.0
    _ok(2, f"{checked} specialized types x {SEQUENCES} sequences, "
           f"zero divergences ({elapsed:.1f}s)")


def test_criterion_3_heuristic_oracle_equivalence():
    cfg = PolicyConfig()
    rng = random.Random(96001)
    mismatches = 0
    total = 12_000
    for _ in range(total):
        profile = random_profile(rng)
        if _decide(profile, cfg) != oracle_decide(profile, cfg):
            mismatches += 1
    assert mismatches == 0

    # boundary vectors
    share_at = make_profile(class_counts=(95, 0, 0, 5) + (0,) * 6, max_size=8)
    assert _decide(share_at, cfg).kind is DecisionKind.EMPTY

    entry_at = make_profile(class_counts=(100,) + (0,) * 9, entry_accesses=3)
    assert _decide(entry_at, cfg).kind is DecisionKind.KEEP

    cap_at = make_profile(class_counts=(0, 0, 0, 0, 0, 0, 100) + (0,) * 3,
                          max_size=256, inserts=100)
    assert _decide(cap_at, cfg).kind is DecisionKind.KEEP

    gets_at = make_profile(class_counts=(0, 0, 0, 100) + (0,) * 6,
                           max_size=8, gets=800, inserts=400)
    assert _decide(gets_at, cfg).kind is DecisionKind.KEEP
    gets_below = make_profile(class_counts=(0, 0, 0, 100) + (0,) * 6,
                              max_size=8, gets=799, inserts=400)
    assert _decide(gets_below, cfg).kind is DecisionKind.ECONOMIC

    _ok(3, f"{total} random profiles match the brute-force rule evaluator; "
           f"all four boundary vectors hold")


def test_criterion_4_fallback_exactness():
    spec = builtin_fixture("singleton-with-drift")
    profile_doc, _ = run_instrumented(spec, spec.default_profile_scale)
    _, baseline = run_instrumented(spec, 1.0)
    optimized = run_optimized(spec, profile_doc, scale=1.0)

    total = optimized.fallback_total()
    assert total.fallbacks == 20
    assert total.allocations == 1000
    assert total.rate == 20 / 1000  # 2.00 %
    row = optimized.fallbacks["SingletonHashMap"]
    assert (row.allocations, row.fallbacks) == (1000, 20)
    assert optimized.workload_digest == baseline.workload_digest

    # accounting closure against independent arithmetic: 980 instances stay a
    # 48-byte object; each of the 20 fallen-back ones adds the original map
    # (64), its table (152), the moved pair's node, and the new key's node
    singleton_object = _align8(_HEADER + 3 * _REF + _BYTE)
    map_object = _align8(_HEADER + _REF + 3 * _INT + 3 * _REF)
    table_16 = _align8(_AHEADER + 16 * _REF)
    entry_node = _align8(_HEADER + _INT + 3 * _REF)
    expected = 980 * singleton_object + 20 * (
        singleton_object + map_object + table_16 + 2 * entry_node
    )
    assert optimized.category_bytes(Category.HASH_MAP) == expected == 54_240
    _ok(4, "1000 instances, exactly 20 fallbacks (2.00 %), behavior equals "
           "baseline, bytes close against the analytic recount")


def test_criterion_5_set_replacement_accounting():
    spec = builtin_fixture("set-heavy")
    profile_doc, _ = run_instrumented(spec, spec.default_profile_scale)
    _, baseline = run_instrumented(spec, 1.0)
    optimized = run_optimized(spec, profile_doc, scale=1.0)

    # analytic expectation, derived from the declared layouts by hand:
    set_object = _align8(_HEADER + _REF)                                  # 24
    map_object = _align8(_HEADER + _REF + 3 * _INT + 3 * _REF)            # 64
    table_16, table_32 = _align8(_AHEADER + 128), _align8(_AHEADER + 256)  # 152, 280
    entry_node = _align8(_HEADER + _INT + 3 * _REF)                       # 48
    base_a = 500 * (set_object + map_object + table_16 + 1 * entry_node)
    base_b = 200 * (set_object + map_object + table_16 + table_32 + 20 * entry_node)

    singleton_set = _align8(_HEADER + _REF + _BYTE + _REF)                # 40
    open_set_object = _align8(_HEADER + _REF + 2 * _INT)                  # 32
    # 20 adds: 16 slots allocated lazily, rehash to 32 after the 13th add
    opt_a = 500 * singleton_set
    opt_b = 200 * (open_set_object + table_16 + table_32)

    def map_set(report):
        return report.category_bytes(Category.HASH_MAP) + report.category_bytes(
            Category.HASH_SET
        )

    assert baseline.category_bytes(Category.HASH_MAP) > 0
    assert optimized.ledger.category(Category.HASH_MAP).count == 0  # no backing maps
    assert optimized.ledger.category(Category.HASH_MAP).bytes == 0
    assert map_set(baseline) == base_a + base_b == 440_000
    assert map_set(optimized) == opt_a + opt_b == 112_800
    assert optimized.workload_digest == baseline.workload_digest

    result = compare(baseline, optimized)
    assert result.combined_map_set_ratio == 112_800 / 440_000
    _ok(5, "replaced sets allocate zero backing maps; combined MAP+SET bytes "
           "440000 -> 112800, matching the analytic prediction exactly")


def _random_store(rng: random.Random) -> ProfileStore:
    store = ProfileStore()
    for index in range(rng.randrange(0, 6)):
        profile = random_profile(rng)
        if rng.random() < 0.3:
            ctx = f"Gen.outer(): {rng.randrange(50)} > Gen.inner(): {index}"
        else:
            ctx = f"Gen.site{index}(): {rng.randrange(50)}"
        store._entries[SiteId.from_ctx(ctx)] = profile
    return store


def _random_plan(rng: random.Random):
    store = _random_store(rng)
    try:
        return build_plan(store, PolicyConfig())
    except Exception:
        return None


def test_criterion_6_round_trips_and_ctx_grammar():
    rng = random.Random(60601)
    stores = plans = 0
    while stores < 1000:
        store = _random_store(rng)
        assert parse(serialize(store)) == store
        stores += 1
    while plans < 1000:
        plan = _random_plan(rng)
        if plan is None:
            continue
        assert plan_parse(plan_serialize(plan)) == plan
        plans += 1

    flat = SiteId((("Foo.bar()", 4),))
    nested = SiteId((("Foo.bar()", 10), ("Foo.baz()", 4)))
    assert flat.ctx == "Foo.bar(): 4"
    assert nested.ctx == "Foo.bar(): 10 > Foo.baz(): 4"
    store = ProfileStore()
    store._entries[nested] = make_profile(class_counts=(14,) + (0,) * 9, max_size=10)
    assert '"ctx": "Foo.bar(): 10 > Foo.baz(): 4"' in serialize(store)
    assert SiteId.from_ctx(nested.ctx) == nested
    _ok(6, f"{stores} profile stores and {plans} plans round-trip; "
           "nested ctx strings match the documented grammar byte for byte")


GOLDEN_AFTER = """\
0: START -> 1
1: ALLOC(SingletonHashMap @ Foo.bar(): 4) -> 2
2: INVOKE_CONSTRUCTOR(SingletonHashMap.<init>) -> 3 | recv=%1
3: INVOKE_VIRTUAL(HashMap.put) -> 4 | recv=%1 args="key", "val"
4: END"""


def test_criterion_7_ir_rewrite_golden():
    graph = fig_style_example_graph("Foo.bar(): 4")
    store = ProfileStore()
    store._entries[SiteId.from_ctx("Foo.bar(): 4")] = make_profile(
        class_counts=(2, 98) + (0,) * 8, max_size=1
    )
    plan = build_plan(store, PolicyConfig())
    rewritten = apply_plan(graph, plan)
    assert dump(rewritten) == GOLDEN_AFTER
    assert dump(apply_plan(rewritten, plan)) == GOLDEN_AFTER  # idempotent
    _ok(7, "three-node allocation rewrite matches the golden dump; pass is idempotent")


def test_criterion_8_size_class_conservation():
    for spec in all_fixtures():
        for scale in (spec.default_profile_scale, 1.0):
            document, report = run_instrumented(spec, scale)
            store = parse(document)
            for site, profile in store.items():
                assert sum(profile.size_class_counts) == profile.allocations, site.ctx
            for summary in report.sites:
                assert sum(summary.size_class_counts) == summary.allocations

    bounds = (0, 1, 2, 8, 16, 64, 256, 1024, 65536)
    for index, bound in enumerate(bounds):
        assert size_class_for(bound) is SizeClass(index)
    assert size_class_for(17) is SizeClass.C64
    assert size_class_for(65537) is SizeClass.INF
    _ok(8, "size-class counts equal allocations in every fixture run; "
           "all ten boundary values and 17->64 check out")


def test_criterion_9_reproducibility(tmp_path):
    spec = builtin_fixture("large-economic-maps")
    outputs = []
    for _ in range(2):
        profile_doc, baseline_report = run_instrumented(spec, spec.default_profile_scale)
        store = parse(profile_doc)
        plan = build_plan(store, PolicyConfig(), provenance="fixture")
        plan_doc = plan_serialize(plan)
        optimized = run_with_plan(spec, plan, scale=1.0)
        outputs.append(
            (
                profile_doc.encode(),
                plan_doc.encode(),
                baseline_report.to_json().encode(),
                optimized.to_json().encode(),
            )
        )
    assert outputs[0] == outputs[1]

    # and through the CLI, as files on disk
    from dsopt.cli import main as cli_main

    digests = []
    for run in ("a", "b"):
        base = tmp_path / run
        base.mkdir()
        assert cli_main(["profile", "--spec", "set-heavy",
                         "--out", str(base / "p.dsprof.json")]) == 0
        assert cli_main(["plan", "--profile", str(base / "p.dsprof.json"),
                         "--out", str(base / "p.dsplan.json")]) == 0
        assert cli_main(["optimize", "--spec", "set-heavy",
                         "--plan", str(base / "p.dsplan.json"),
                         "--report", str(base / "r.json")]) == 0
        digests.append(
            tuple(
                (base / name).read_bytes()
                for name in ("p.dsprof.json", "p.dsplan.json", "r.json")
            )
        )
    assert digests[0] == digests[1]
    _ok(9, "two pipeline runs produced byte-identical profile, plan, and report files")


def test_plan_decisions_cover_every_replacement_shape():
    # sanity net under the acceptance suite: every decision kind is reachable
    rng = random.Random(321)
    seen: set[tuple[DsKind, DecisionKind]] = set()
    for _ in range(4000):
        profile = random_profile(rng)
        decision = _decide(profile, PolicyConfig())
        seen.add((profile.kind, decision.kind))
    assert (DsKind.HASH_MAP, DecisionKind.ECONOMIC) in seen
    assert (DsKind.HASH_SET, DecisionKind.OPEN_SET) in seen
    assert (DsKind.ARRAY_LIST, DecisionKind.PRIMITIVE_LIST) in seen
    assert ReplacementDecision(DecisionKind.PRIMITIVE_LIST, ElementTypeTag.INT) == primitive_list(
        ElementTypeTag.INT
    )
