"""Rewriting an allocation in the miniature graph IR.

Compile-time replacement means three edits around one allocation: the
ALLOC node is retyped to the replacement, its constructor invocation is
retargeted to the replacement's counterpart, and direct calls on that
receiver become virtual calls (their target is only known at run time
once the receiver's type changed). Everything else is untouched, and
re-applying the pass changes nothing.
"""

from dsopt import (
    PolicyConfig,
    ProfileStore,
    SiteId,
    apply_plan,
    build_plan,
    dump,
)
from dsopt.ir import fig_style_example_graph
from dsopt.profiles import DsKind, SiteProfile

graph = fig_style_example_graph("Cart.init(): 3")

# a profile in which this site held at most one pair 98 % of the time
store = ProfileStore()
profile = SiteProfile(DsKind.HASH_MAP)
profile.allocations = 100
profile.size_class_counts = [2, 98, 0, 0, 0, 0, 0, 0, 0, 0]
profile.max_size = 1
store._entries[SiteId.from_ctx("Cart.init(): 3")] = profile
plan = build_plan(store, PolicyConfig())

print("=== before ===")
print(dump(graph))

rewritten = apply_plan(graph, plan)
print()
print("=== after ===")
print(dump(rewritten))

print()
print("idempotent:", dump(apply_plan(rewritten, plan)) == dump(rewritten))
