"""Fallback: what happens when production drifts from the profile.

The drift fixture profiles almost entirely one-pair maps, so the site is
replaced with the one-pair specialization. At measurement scale, exactly
2 % of the instances receive a second key; each of those allocates the
original map, moves its cached pair across, and delegates from then on.
Behavior is unchanged, the fallback rate is reported exactly, and the
byte savings survive the drift.
"""

from dsopt import builtin_fixture, compare, run_instrumented, run_optimized

spec = builtin_fixture("singleton-with-drift")

profile_doc, _ = run_instrumented(spec, scale=spec.default_profile_scale)
_, baseline = run_instrumented(spec, scale=1.0)
optimized = run_optimized(spec, profile_doc, scale=1.0)

print("=== fallback table of the optimized run ===")
for type_name, row in optimized.fallbacks.items():
    print(f"  {type_name}: {row.fallbacks} of {row.allocations} instances "
          f"fell back ({100 * (row.rate or 0):.2f} %)")

print()
print("=== behavior and bytes ===")
result = compare(baseline, optimized)
print(f"  observable behavior identical: {result.behavior_match}")
print(f"  HASH_MAP bytes: {baseline.ledger.category('HASH_MAP').bytes} -> "
      f"{optimized.ledger.category('HASH_MAP').bytes}")
print(f"  overall ratio (lower is better): {result.overall_ratio:.4f}")
