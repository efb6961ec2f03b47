"""Replacement heuristics: profile in, per-site replacement plan out.

Decisions are evaluated in a fixed order. For maps: first the fixed-size
rule (the cumulative share of instances whose maximum stayed within size
class 0, 1, or 2 must reach the share threshold, and the site must show
fewer than the entry-access limit), then the flat-array rule (entry
accesses below a fraction of inserts, most instances beyond the minimum
size, maximum size under the cap, and fewer average reads per instance
than the maximum size). Sets take the fixed-size rule without the entry
condition and otherwise always switch to the open-addressing set. Lists
take the fixed-size rule, then the single-primitive-type rule.

Instance maxima are binned, so "at least N elements" is approximated by
"in a size class whose bound is >= N" (the tightest test the bins allow).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping

from .baseline import BaselineLinkedMap, BaselineList, BaselineMap, BaselineSet
from .profiles import (
    DsKind,
    ElementTypeTag,
    PRIMITIVE_TAGS,
    ProfileStore,
    SiteId,
    SizeClass,
    SiteProfile,
)
from .runtime import Runtime
from .specialized import (
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


class EngineError(Exception):
    """Invalid profile input or incompatible decision usage."""


class PlanParseError(EngineError):
    """A plan document that violates the on-disk schema."""


@dataclass(frozen=True)
class PolicyConfig:
    """Thresholds steering the replacement decisions; all tunable."""

    fixed_size_share: float = 0.95
    entry_access_ratio_max: float = 0.05
    fixed_entry_access_limit: int = 3  # exclusive
    economic_min_size: int = 5
    economic_min_size_share: float = 0.90
    economic_size_cap: int = 256  # exclusive
    exclude: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        positives = (
            self.fixed_size_share,
            self.entry_access_ratio_max,
            self.economic_min_size_share,
        )
        if any(share <= 0 for share in positives):
            raise ValueError("share thresholds must be positive")
        if self.fixed_entry_access_limit <= 0 or self.economic_min_size <= 0:
            raise ValueError("limits must be positive")
        if self.economic_size_cap <= 0:
            raise ValueError("size cap must be positive")

    def to_json_dict(self) -> dict:
        return {
            "fixed_size_share": self.fixed_size_share,
            "entry_access_ratio_max": self.entry_access_ratio_max,
            "fixed_entry_access_limit": self.fixed_entry_access_limit,
            "economic_min_size": self.economic_min_size,
            "economic_min_size_share": self.economic_min_size_share,
            "economic_size_cap": self.economic_size_cap,
            "exclude": list(self.exclude),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> PolicyConfig:
        try:
            return cls(
                fixed_size_share=data["fixed_size_share"],
                entry_access_ratio_max=data["entry_access_ratio_max"],
                fixed_entry_access_limit=data["fixed_entry_access_limit"],
                economic_min_size=data["economic_min_size"],
                economic_min_size_share=data["economic_min_size_share"],
                economic_size_cap=data["economic_size_cap"],
                exclude=tuple(data.get("exclude", ())),
            )
        except KeyError as exc:
            raise PlanParseError(f"policy is missing {exc.args[0]!r}") from None


class DecisionKind(Enum):
    KEEP = "KEEP"
    EMPTY = "EMPTY"
    SINGLETON = "SINGLETON"
    SIZE2 = "SIZE2"
    ECONOMIC = "ECONOMIC"
    OPEN_SET = "OPEN_SET"
    PRIMITIVE_LIST = "PRIMITIVE_LIST"


@dataclass(frozen=True)
class ReplacementDecision:
    kind: DecisionKind
    element_tag: ElementTypeTag | None = None

    def __post_init__(self) -> None:
        if (self.kind is DecisionKind.PRIMITIVE_LIST) != (self.element_tag is not None):
            raise ValueError("an element tag is required exactly for primitive-list decisions")


KEEP = ReplacementDecision(DecisionKind.KEEP)
EMPTY = ReplacementDecision(DecisionKind.EMPTY)
SINGLETON = ReplacementDecision(DecisionKind.SINGLETON)
SIZE2 = ReplacementDecision(DecisionKind.SIZE2)
ECONOMIC = ReplacementDecision(DecisionKind.ECONOMIC)
OPEN_SET = ReplacementDecision(DecisionKind.OPEN_SET)


def primitive_list(tag: ElementTypeTag) -> ReplacementDecision:
    return ReplacementDecision(DecisionKind.PRIMITIVE_LIST, tag)


_FIXED_SIZE_DECISIONS = (
    (SizeClass.C0, EMPTY),
    (SizeClass.C1, SINGLETON),
    (SizeClass.C2, SIZE2),
)

#: Decisions legal for each data-structure kind.
COMPATIBLE_DECISIONS: Mapping[DsKind, frozenset[DecisionKind]] = {
    DsKind.HASH_MAP: frozenset(
        {DecisionKind.KEEP, DecisionKind.EMPTY, DecisionKind.SINGLETON, DecisionKind.SIZE2,
         DecisionKind.ECONOMIC}
    ),
    DsKind.LINKED_HASH_MAP: frozenset(
        {DecisionKind.KEEP, DecisionKind.EMPTY, DecisionKind.SINGLETON, DecisionKind.SIZE2,
         DecisionKind.ECONOMIC}
    ),
    DsKind.HASH_SET: frozenset(
        {DecisionKind.KEEP, DecisionKind.EMPTY, DecisionKind.SINGLETON, DecisionKind.SIZE2,
         DecisionKind.OPEN_SET}
    ),
    DsKind.ARRAY_LIST: frozenset(
        {DecisionKind.KEEP, DecisionKind.EMPTY, DecisionKind.SINGLETON, DecisionKind.SIZE2,
         DecisionKind.PRIMITIVE_LIST}
    ),
}


def _require_allocations(profile: SiteProfile) -> None:
    if profile.allocations == 0:
        raise EngineError("cannot decide a site with zero allocations")


def _fixed_size_decision(
    profile: SiteProfile, cfg: PolicyConfig, entry_limited: bool
) -> ReplacementDecision | None:
    """Smallest capacity whose cumulative instance share clears the threshold."""
    if entry_limited and not profile.entry_accesses < cfg.fixed_entry_access_limit:
        return None
    cumulative = 0
    for size_class, decision in _FIXED_SIZE_DECISIONS:
        cumulative += profile.size_class_counts[size_class]
        if cumulative / profile.allocations >= cfg.fixed_size_share:
            return decision
    return None


def _share_with_min_size(profile: SiteProfile, min_size: int) -> float:
    """Share of instances whose size class admits a maximum >= min_size."""
    eligible = sum(
        count
        for size_class, count in zip(SizeClass, profile.size_class_counts)
        if size_class.bound is None or size_class.bound >= min_size
    )
    return eligible / profile.allocations


def decide_map(profile: SiteProfile, cfg: PolicyConfig) -> ReplacementDecision:
    if profile.kind not in (DsKind.HASH_MAP, DsKind.LINKED_HASH_MAP):
        raise EngineError(f"decide_map applied to a {profile.kind.name} profile")
    _require_allocations(profile)
    fixed = _fixed_size_decision(profile, cfg, entry_limited=True)
    if fixed is not None:
        return fixed
    if (
        profile.entry_accesses < cfg.entry_access_ratio_max * profile.inserts
        and _share_with_min_size(profile, cfg.economic_min_size) >= cfg.economic_min_size_share
        and profile.max_size < cfg.economic_size_cap
        and profile.gets / profile.allocations < profile.max_size
    ):
        return ECONOMIC
    return KEEP


def decide_set(profile: SiteProfile, cfg: PolicyConfig) -> ReplacementDecision:
    if profile.kind is not DsKind.HASH_SET:
        raise EngineError(f"decide_set applied to a {profile.kind.name} profile")
    _require_allocations(profile)
    fixed = _fixed_size_decision(profile, cfg, entry_limited=False)
    if fixed is not None:
        return fixed
    return OPEN_SET


def decide_list(profile: SiteProfile, cfg: PolicyConfig) -> ReplacementDecision:
    if profile.kind is not DsKind.ARRAY_LIST:
        raise EngineError(f"decide_list applied to a {profile.kind.name} profile")
    _require_allocations(profile)
    fixed = _fixed_size_decision(profile, cfg, entry_limited=False)
    if fixed is not None:
        return fixed
    tags = profile.element_types()
    if len(tags) == 1:
        (tag,) = tags
        if tag in PRIMITIVE_TAGS:
            return primitive_list(tag)
    return KEEP


_DECIDERS: Mapping[DsKind, Callable[[SiteProfile, PolicyConfig], ReplacementDecision]] = {
    DsKind.HASH_MAP: decide_map,
    DsKind.LINKED_HASH_MAP: decide_map,
    DsKind.HASH_SET: decide_set,
    DsKind.ARRAY_LIST: decide_list,
}


@dataclass(frozen=True)
class PlanEntry:
    kind: DsKind
    decision: ReplacementDecision


@dataclass(frozen=True)
class ReplacementPlan:
    """Site-by-site replacement decisions plus the policy that produced them."""

    decisions: dict[SiteId, PlanEntry] = field(default_factory=dict)
    policy: PolicyConfig = PolicyConfig()
    provenance: str = ""

    def decision_for(self, site: SiteId) -> ReplacementDecision:
        entry = self.decisions.get(site)
        return KEEP if entry is None else entry.decision

    def replaced_sites(self) -> list[SiteId]:
        return [
            site
            for site, entry in sorted(self.decisions.items(), key=lambda kv: kv[0].ctx)
            if entry.decision.kind is not DecisionKind.KEEP
        ]


def build_plan(store: ProfileStore, cfg: PolicyConfig, provenance: str = "") -> ReplacementPlan:
    """Apply the kind-appropriate heuristic to every profiled site."""
    excluded = set(cfg.exclude)
    decisions: dict[SiteId, PlanEntry] = {}
    for site in store.sites():
        profile = store.get(site)
        assert profile is not None
        if site.ctx in excluded:
            decision = KEEP
        else:
            decision = _DECIDERS[profile.kind](profile, cfg)
        decisions[site] = PlanEntry(profile.kind, decision)
    return ReplacementPlan(decisions=decisions, policy=cfg, provenance=provenance)


# ---------------------------------------------------------------------------
# runtime construction


_ORIGINAL_TYPE_NAMES: Mapping[DsKind, str] = {
    DsKind.HASH_MAP: "HashMap",
    DsKind.LINKED_HASH_MAP: "LinkedHashMap",
    DsKind.HASH_SET: "HashSet",
    DsKind.ARRAY_LIST: "ArrayList",
}

_BASELINE_CLASSES = {
    DsKind.HASH_MAP: BaselineMap,
    DsKind.LINKED_HASH_MAP: BaselineLinkedMap,
    DsKind.HASH_SET: BaselineSet,
    DsKind.ARRAY_LIST: BaselineList,
}

_REPLACEMENT_CLASSES: Mapping[tuple[DsKind, DecisionKind], type] = {
    (DsKind.HASH_MAP, DecisionKind.EMPTY): EmptyMap,
    (DsKind.HASH_MAP, DecisionKind.SINGLETON): SingletonMap,
    (DsKind.HASH_MAP, DecisionKind.SIZE2): Size2Map,
    (DsKind.HASH_MAP, DecisionKind.ECONOMIC): EconomicMap,
    (DsKind.LINKED_HASH_MAP, DecisionKind.EMPTY): EmptyLinkedMap,
    (DsKind.LINKED_HASH_MAP, DecisionKind.SINGLETON): SingletonLinkedMap,
    (DsKind.LINKED_HASH_MAP, DecisionKind.SIZE2): Size2LinkedMap,
    (DsKind.LINKED_HASH_MAP, DecisionKind.ECONOMIC): EconomicLinkedMap,
    (DsKind.HASH_SET, DecisionKind.EMPTY): FixedSet0,
    (DsKind.HASH_SET, DecisionKind.SINGLETON): FixedSet1,
    (DsKind.HASH_SET, DecisionKind.SIZE2): FixedSet2,
    (DsKind.HASH_SET, DecisionKind.OPEN_SET): OpenSet,
    (DsKind.ARRAY_LIST, DecisionKind.EMPTY): FixedList0,
    (DsKind.ARRAY_LIST, DecisionKind.SINGLETON): FixedList1,
    (DsKind.ARRAY_LIST, DecisionKind.SIZE2): FixedList2,
}

_FIXED_SIZE_NAME_PREFIX = {
    DecisionKind.EMPTY: "Empty",
    DecisionKind.SINGLETON: "Singleton",
    DecisionKind.SIZE2: "Size2",
}


def replacement_type_name(kind: DsKind, decision: ReplacementDecision) -> str:
    """Conventional type name of the structure a decision constructs."""
    if decision.kind is DecisionKind.KEEP:
        return _ORIGINAL_TYPE_NAMES[kind]
    if decision.kind in _FIXED_SIZE_NAME_PREFIX:
        return _FIXED_SIZE_NAME_PREFIX[decision.kind] + _ORIGINAL_TYPE_NAMES[kind]
    if decision.kind is DecisionKind.ECONOMIC:
        return "Economic" + _ORIGINAL_TYPE_NAMES[kind]
    if decision.kind is DecisionKind.OPEN_SET:
        return "OpenAddressingHashSet"
    assert decision.kind is DecisionKind.PRIMITIVE_LIST and decision.element_tag is not None
    return decision.element_tag.name.title() + "ArrayList"


def all_replacement_type_names() -> frozenset[str]:
    names = set()
    for kind in DsKind:
        for decision_kind in COMPATIBLE_DECISIONS[kind]:
            if decision_kind is DecisionKind.KEEP:
                continue
            if decision_kind is DecisionKind.PRIMITIVE_LIST:
                for tag in PRIMITIVE_TAGS:
                    names.add(replacement_type_name(kind, primitive_list(tag)))
            else:
                names.add(replacement_type_name(kind, ReplacementDecision(decision_kind)))
    return frozenset(names)


def site_factory(
    plan: ReplacementPlan,
    site: SiteId,
    kind: DsKind,
    runtime: Runtime | None = None,
    initial_capacity: int | None = None,
):
    """Construct the planned structure for a site (baseline for KEEP/unknown)."""
    entry = plan.decisions.get(site)
    if entry is None:
        decision = KEEP
    else:
        if entry.kind is not kind:
            raise EngineError(
                f"site {site.ctx} was profiled as {entry.kind.name}, "
                f"but a {kind.name} is being constructed"
            )
        decision = entry.decision
    if decision.kind is DecisionKind.KEEP:
        return _BASELINE_CLASSES[kind](runtime, site, initial_capacity)
    if decision.kind is DecisionKind.PRIMITIVE_LIST:
        assert decision.element_tag is not None
        return PrimitiveList(runtime, site, decision.element_tag, initial_capacity)
    cls = _REPLACEMENT_CLASSES[(kind, decision.kind)]
    return cls(runtime, site, initial_capacity)


# ---------------------------------------------------------------------------
# plan documents (``*.dsplan.json``)


def plan_serialize(plan: ReplacementPlan) -> str:
    decisions = []
    for site, entry in sorted(plan.decisions.items(), key=lambda kv: kv[0].ctx):
        record = {
            "ctx": site.ctx,
            "kind": entry.kind.value,
            "decision": entry.decision.kind.value,
        }
        if entry.decision.element_tag is not None:
            record["element_type"] = entry.decision.element_tag.name
        decisions.append(record)
    document = {
        "provenance": plan.provenance,
        "policy": plan.policy.to_json_dict(),
        "decisions": decisions,
    }
    return json.dumps(document, indent=2)


def plan_parse(document: str) -> ReplacementPlan:
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise PlanParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise PlanParseError("plan document must be a JSON object")
    policy = PolicyConfig.from_json_dict(data.get("policy", {}))
    provenance = data.get("provenance", "")
    raw_decisions = data.get("decisions")
    if not isinstance(raw_decisions, list):
        raise PlanParseError("plan document needs a 'decisions' array")

    decisions: dict[SiteId, PlanEntry] = {}
    for record in raw_decisions:
        ctx = record.get("ctx")
        if not isinstance(ctx, str):
            raise PlanParseError("plan decision is missing a string 'ctx'")
        try:
            site = SiteId.from_ctx(ctx)
        except ValueError as exc:
            raise PlanParseError(str(exc)) from exc
        if site in decisions:
            raise PlanParseError(f"duplicate ctx {ctx!r}")
        try:
            kind = DsKind(record.get("kind"))
        except ValueError:
            raise PlanParseError(f"unknown kind {record.get('kind')!r} for ctx {ctx!r}") from None
        try:
            decision_kind = DecisionKind(record.get("decision"))
        except ValueError:
            raise PlanParseError(
                f"unknown decision {record.get('decision')!r} for ctx {ctx!r}"
            ) from None
        tag_name = record.get("element_type")
        tag = None
        if tag_name is not None:
            try:
                tag = ElementTypeTag[tag_name]
            except KeyError:
                raise PlanParseError(
                    f"unknown element type {tag_name!r} for ctx {ctx!r}"
                ) from None
        try:
            decision = ReplacementDecision(decision_kind, tag)
        except ValueError as exc:
            raise PlanParseError(f"ctx {ctx!r}: {exc}") from exc
        if decision_kind not in COMPATIBLE_DECISIONS[kind]:
            raise PlanParseError(
                f"decision {decision_kind.value} is not valid for {kind.value} (ctx {ctx!r})"
            )
        decisions[site] = PlanEntry(kind, decision)
    return ReplacementPlan(decisions=decisions, policy=policy, provenance=provenance)
