"""Build a replacement plan from a profile and steer it with thresholds.

The decision rules look at each site's size-class shares, entry-access
pressure, and read/size balance. Every threshold is a policy knob: this
script decides the same profile twice, once with the defaults and once
with an unsatisfiable fixed-size share, which disables the fixed-size
replacements entirely.
"""

from dsopt import (
    PolicyConfig,
    build_plan,
    builtin_fixture,
    parse,
    plan_serialize,
    replacement_type_name,
    run_instrumented,
)

spec = builtin_fixture("large-economic-maps")
document, _ = run_instrumented(spec, scale=spec.default_profile_scale)
store = parse(document)

print("=== decisions with default thresholds ===")
plan = build_plan(store, PolicyConfig(), provenance="demo")
for site, entry in sorted(plan.decisions.items(), key=lambda kv: kv[0].ctx):
    target = replacement_type_name(entry.kind, entry.decision)
    print(f"  {site.ctx:<32} {entry.decision.kind.value:<10} -> {target}")

print()
print("=== the same profile with fixed-size replacement disabled ===")
strict = build_plan(store, PolicyConfig(fixed_size_share=1.01))
for site, entry in sorted(strict.decisions.items(), key=lambda kv: kv[0].ctx):
    print(f"  {site.ctx:<32} {entry.decision.kind.value}")

print()
print("=== the plan document (written as *.dsplan.json by the CLI) ===")
print(plan_serialize(plan))
