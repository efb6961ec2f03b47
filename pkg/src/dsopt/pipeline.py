"""The two-phase pipeline: instrumented run, plan, optimized run, compare.

The instrumented run executes a workload against the baseline collections
(typically at a reduced scale) and serializes the gathered profile. The
optimized run consumes that profile, builds a replacement plan, constructs
each site's collection through the plan, and reports replacement counts
and fallback rates alongside the byte ledger.
"""

from __future__ import annotations

import hashlib
from pathlib import PurePath

from .engine import (
    DecisionKind,
    PolicyConfig,
    ReplacementPlan,
    build_plan,
    replacement_type_name,
)
from .profiles import ProfileStore, parse, serialize
from .reports import (
    FallbackRow,
    ReplacementCount,
    RunReport,
    SiteSummary,
    SpecIdentity,
    histogram_from_store,
)
from .runtime import Runtime
from .workload import WorkloadError, WorkloadSpec, execute


def _site_summaries(store: ProfileStore) -> tuple[SiteSummary, ...]:
    summaries = []
    for site in store.sites():
        profile = store.get(site)
        assert profile is not None
        summaries.append(
            SiteSummary(
                ctx=site.ctx,
                kind=profile.kind.value,
                allocations=profile.allocations,
                max_size=profile.max_size,
                gets=profile.gets,
                inserts=profile.inserts,
                entry_accesses=profile.entry_accesses,
                element_types=tuple(sorted(t.name for t in profile.element_types())),
                size_class_counts=tuple(profile.size_class_counts),
            )
        )
    return tuple(summaries)


def _replacement_tables(
    spec: WorkloadSpec, plan: ReplacementPlan, runtime: Runtime
) -> tuple[dict[str, ReplacementCount], dict[str, FallbackRow]]:
    replacements: dict[str, ReplacementCount] = {}
    fallbacks: dict[str, FallbackRow] = {}
    for sw in spec.sites:
        entry = plan.decisions.get(sw.site)
        if entry is None or entry.decision.kind is DecisionKind.KEEP:
            continue
        type_name = replacement_type_name(entry.kind, entry.decision)
        profile = runtime.profile.get(sw.site)
        allocations = 0 if profile is None else profile.allocations
        fell_back = runtime.fallback_count(sw.site)
        previous = replacements.get(type_name, ReplacementCount(0, 0))
        replacements[type_name] = ReplacementCount(
            sites=previous.sites + 1, allocations=previous.allocations + allocations
        )
        previous_row = fallbacks.get(type_name, FallbackRow(0, 0))
        fallbacks[type_name] = FallbackRow(
            allocations=previous_row.allocations + allocations,
            fallbacks=previous_row.fallbacks + fell_back,
        )
    return replacements, fallbacks


def _build_report(
    spec: WorkloadSpec,
    scale: float,
    mode: str,
    runtime: Runtime,
    digest: str,
    plan: ReplacementPlan | None,
) -> RunReport:
    replacements: dict[str, ReplacementCount] = {}
    fallbacks: dict[str, FallbackRow] = {}
    if plan is not None:
        replacements, fallbacks = _replacement_tables(spec, plan, runtime)
    return RunReport(
        identity=SpecIdentity(name=spec.name, seed=spec.seed, scale=scale),
        mode=mode,
        workload_digest=digest,
        ledger=runtime.ledger.snapshot(),
        sites=_site_summaries(runtime.profile),
        histogram=histogram_from_store(runtime.profile),
        replacements=replacements,
        fallbacks=fallbacks,
    )


def run_instrumented(spec: WorkloadSpec, scale: float) -> tuple[str, RunReport]:
    """Execute with instrumented baselines; returns (profile document, report)."""
    runtime = Runtime()
    digest = execute(spec, scale, runtime, plan=None)
    document = serialize(runtime.profile)
    report = _build_report(spec, scale, "baseline", runtime, digest, plan=None)
    return document, report


def check_spec_profile_alignment(spec: WorkloadSpec, store: ProfileStore) -> None:
    """Spec sites present in the profile must agree on the structure kind."""
    problems = []
    for sw in spec.sites:
        profile = store.get(sw.site)
        if profile is not None and profile.kind is not sw.kind:
            problems.append(
                f"{sw.site.ctx}: spec says {sw.kind.value}, profile says {profile.kind.value}"
            )
    if problems:
        raise WorkloadError("profile/spec mismatch: " + "; ".join(problems))


def run_with_plan(spec: WorkloadSpec, plan: ReplacementPlan, scale: float = 1.0) -> RunReport:
    """Execute the workload with collections constructed through the plan."""
    for sw in spec.sites:
        entry = plan.decisions.get(sw.site)
        if entry is not None and entry.kind is not sw.kind:
            raise WorkloadError(
                f"profile/spec mismatch: {sw.site.ctx}: spec says {sw.kind.value}, "
                f"plan says {entry.kind.value}"
            )
    runtime = Runtime()
    digest = execute(spec, scale, runtime, plan=plan)
    return _build_report(spec, scale, "optimized", runtime, digest, plan)


def run_optimized(
    spec: WorkloadSpec,
    profile_document: str,
    cfg: PolicyConfig = PolicyConfig(),
    scale: float = 1.0,
) -> RunReport:
    """Plan from a profile document, then execute the optimized run."""
    store = parse(profile_document)
    check_spec_profile_alignment(spec, store)
    provenance = "sha256:" + hashlib.sha256(profile_document.encode()).hexdigest()
    plan = build_plan(store, cfg, provenance=provenance)
    return run_with_plan(spec, plan, scale)


def profile_file_provenance(path_label: str, document: str) -> str:
    """Identify a profile by basename and content hash.

    Directory components are dropped so that identical inputs yield
    byte-identical plan files regardless of where they were staged.
    """
    digest = hashlib.sha256(document.encode()).hexdigest()
    name = PurePath(path_label).name
    return f"{name}:sha256:{digest}"
