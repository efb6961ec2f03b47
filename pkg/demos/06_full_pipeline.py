"""The full two-phase pipeline over every built-in fixture.

For each fixture: profile at reduced scale, plan, run the measurement
workload both ways, and compare. The behavior digest proves the
optimized run observed exactly the same results; the ratios show where
the bytes went (map+set combines the two categories because replaced
sets stop allocating their internal backing maps).
"""

from dsopt import (
    PolicyConfig,
    all_fixtures,
    build_plan,
    compare,
    parse,
    run_instrumented,
    run_with_plan,
)


def show(value) -> str:
    return " n/a " if value is None else f"{value:.3f}"


print(f"{'fixture':<22} {'behave':<7} {'overall':<8} {'map+set':<8} "
      f"{'lists':<8} fallbacks")
for spec in all_fixtures():
    profile_doc, _ = run_instrumented(spec, spec.default_profile_scale)
    plan = build_plan(parse(profile_doc), PolicyConfig())
    _, baseline = run_instrumented(spec, 1.0)
    optimized = run_with_plan(spec, plan, 1.0)
    result = compare(baseline, optimized)
    fallback = optimized.fallback_total()
    print(
        f"{spec.name:<22} {'yes' if result.behavior_match else 'NO':<7} "
        f"{show(result.overall_ratio):<8} {show(result.combined_map_set_ratio):<8} "
        f"{show(result.category_ratios['ARRAY_LIST']):<8} "
        f"{fallback.fallbacks}/{fallback.allocations}"
    )

print()
print("every ratio is optimized/baseline allocated bytes; lower is better.")
