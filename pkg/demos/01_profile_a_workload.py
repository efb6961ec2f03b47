"""Profile a synthetic workload and read the resulting site profiles.

An instrumented run executes every allocation site's behavior program
against the baseline collections and gathers per-site counters:
allocations, maximum size, size-class counts, reads, inserts, and entry
accesses. The profile serializes to a small JSON document keyed by the
site's context string.
"""

from dsopt import (
    Distribution,
    DsKind,
    SiteId,
    SiteWorkload,
    WorkloadSpec,
    histogram,
    render_histogram_text,
    run_instrumented,
)

spec = WorkloadSpec(
    name="demo-profile",
    seed=7,
    sites=(
        SiteWorkload(
            site=SiteId.from_ctx("Catalog.lookup(): 12"),
            kind=DsKind.HASH_MAP,
            instances=50,
            sizes=Distribution(values=(0, 1, 3), weights=(70.0, 20.0, 10.0)),
            gets=Distribution.fixed(4),
            entry_iterations=Distribution.fixed(1),
        ),
        SiteWorkload(
            site=SiteId.from_ctx("Catalog.lookup(): 30 > Render.page(): 4"),
            kind=DsKind.HASH_SET,
            instances=20,
            sizes=Distribution.fixed(2),
        ),
    ),
)

print("=== instrumented run (half scale, as a profiling pass would use) ===")
document, report = run_instrumented(spec, scale=0.5)
print(document)

print()
print("=== size-class histogram ===")
print(render_histogram_text(histogram(document)))

print()
print("=== allocated bytes by category ===")
for name, totals in report.ledger.categories.items():
    if totals.count:
        print(f"  {name:<16} count={totals.count:>5}  bytes={totals.bytes:>8}")
print(f"  {'OVERALL':<16} {'':>11}  bytes={report.ledger.overall_bytes:>8}")
