"""Run and comparison reports.

A run report captures everything observable about one workload execution:
the byte ledger, per-site profile summaries, replacement counts by type,
the fallback table, and size-class histograms. A comparison report sets an
optimized run against its baseline as optimized/baseline byte ratios
(lower is better); because replaced sets avoid their internal backing map,
map and set bytes are also reported as one combined row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .costmodel import Category, LedgerSnapshot
from .profiles import DsKind, ProfileStore, SizeClass, parse


class ReportError(Exception):
    """Report files that cannot be read or do not belong together."""


@dataclass(frozen=True)
class SpecIdentity:
    name: str
    seed: int
    scale: float

    def to_json_dict(self) -> dict:
        return {"name": self.name, "seed": self.seed, "scale": self.scale}

    @classmethod
    def from_json_dict(cls, data: dict) -> SpecIdentity:
        return cls(name=data["name"], seed=data["seed"], scale=data["scale"])


@dataclass(frozen=True)
class SiteSummary:
    ctx: str
    kind: str
    allocations: int
    max_size: int
    gets: int
    inserts: int
    entry_accesses: int
    element_types: tuple[str, ...]
    size_class_counts: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {
            "ctx": self.ctx,
            "kind": self.kind,
            "allocations": self.allocations,
            "max_size": self.max_size,
            "gets": self.gets,
            "inserts": self.inserts,
            "entry_accesses": self.entry_accesses,
            "element_types": list(self.element_types),
            "size_class_counts": list(self.size_class_counts),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> SiteSummary:
        return cls(
            ctx=data["ctx"],
            kind=data["kind"],
            allocations=data["allocations"],
            max_size=data["max_size"],
            gets=data["gets"],
            inserts=data["inserts"],
            entry_accesses=data["entry_accesses"],
            element_types=tuple(data["element_types"]),
            size_class_counts=tuple(data["size_class_counts"]),
        )


@dataclass(frozen=True)
class ReplacementCount:
    sites: int
    allocations: int


@dataclass(frozen=True)
class FallbackRow:
    allocations: int
    fallbacks: int

    @property
    def rate(self) -> float | None:
        return None if self.allocations == 0 else self.fallbacks / self.allocations


@dataclass(frozen=True)
class RunReport:
    identity: SpecIdentity
    mode: str  # "baseline" or "optimized"
    workload_digest: str
    ledger: LedgerSnapshot
    sites: tuple[SiteSummary, ...]
    histogram: dict[str, tuple[int, ...]] = field(default_factory=dict)
    replacements: dict[str, ReplacementCount] = field(default_factory=dict)
    fallbacks: dict[str, FallbackRow] = field(default_factory=dict)

    def fallback_total(self) -> FallbackRow:
        return FallbackRow(
            allocations=sum(row.allocations for row in self.fallbacks.values()),
            fallbacks=sum(row.fallbacks for row in self.fallbacks.values()),
        )

    def category_bytes(self, category: Category) -> int:
        return self.ledger.category(category).bytes

    def to_json_dict(self) -> dict:
        total = self.fallback_total()
        return {
            "spec": self.identity.to_json_dict(),
            "mode": self.mode,
            "workload_digest": self.workload_digest,
            "ledger": self.ledger.to_json_dict(),
            "sites": [site.to_json_dict() for site in self.sites],
            "size_class_histogram": {k: list(v) for k, v in sorted(self.histogram.items())},
            "replacements": {
                name: {"sites": rc.sites, "allocations": rc.allocations}
                for name, rc in sorted(self.replacements.items())
            },
            "fallbacks": {
                "by_type": {
                    name: {
                        "allocations": row.allocations,
                        "fallbacks": row.fallbacks,
                        "rate": row.rate,
                    }
                    for name, row in sorted(self.fallbacks.items())
                },
                "total": {
                    "allocations": total.allocations,
                    "fallbacks": total.fallbacks,
                    "rate": total.rate,
                },
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> RunReport:
        try:
            return cls(
                identity=SpecIdentity.from_json_dict(data["spec"]),
                mode=data["mode"],
                workload_digest=data["workload_digest"],
                ledger=LedgerSnapshot.from_json_dict(data["ledger"]),
                sites=tuple(SiteSummary.from_json_dict(s) for s in data["sites"]),
                histogram={
                    k: tuple(v) for k, v in data.get("size_class_histogram", {}).items()
                },
                replacements={
                    name: ReplacementCount(rc["sites"], rc["allocations"])
                    for name, rc in data.get("replacements", {}).items()
                },
                fallbacks={
                    name: FallbackRow(row["allocations"], row["fallbacks"])
                    for name, row in data.get("fallbacks", {}).get("by_type", {}).items()
                },
            )
        except KeyError as exc:
            raise ReportError(f"run report is missing {exc.args[0]!r}") from None

    @classmethod
    def from_json(cls, document: str) -> RunReport:
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ReportError(f"malformed run report: {exc}") from exc
        return cls.from_json_dict(data)

    def render_text(self) -> str:
        lines = [
            f"run: {self.identity.name} (seed={self.identity.seed}, "
            f"scale={self.identity.scale}, mode={self.mode})",
            f"digest: {self.workload_digest}",
            "",
            "allocated bytes by category:",
        ]
        for name, total in self.ledger.categories.items():
            lines.append(f"  {name:<16} count={total.count:>10}  bytes={total.bytes:>14}")
        lines.append(f"  {'OVERALL':<16} {'':>16}  bytes={self.ledger.overall_bytes:>14}")
        if self.replacements:
            lines.append("")
            lines.append("replacements by type:")
            for name, rc in sorted(self.replacements.items()):
                lines.append(
                    f"  {name:<24} sites={rc.sites:>4}  allocations={rc.allocations:>10}"
                )
        if self.fallbacks:
            lines.append("")
            lines.append("fallbacks:")
            for name, row in sorted(self.fallbacks.items()):
                rate = "n/a" if row.rate is None else f"{row.rate * 100:.2f} %"
                lines.append(
                    f"  {name:<24} allocations={row.allocations:>10}  "
                    f"fallbacks={row.fallbacks:>8}  rate={rate:>9}"
                )
            total = self.fallback_total()
            rate = "n/a" if total.rate is None else f"{total.rate * 100:.2f} %"
            lines.append(
                f"  {'TOTAL':<24} allocations={total.allocations:>10}  "
                f"fallbacks={total.fallbacks:>8}  rate={rate:>9}"
            )
        if self.histogram:
            lines.append("")
            lines.append(render_histogram_text(self.histogram))
        return "\n".join(lines)


def _ratio(optimized: int, baseline: int) -> float | None:
    return None if baseline == 0 else optimized / baseline


@dataclass(frozen=True)
class ComparisonReport:
    baseline: RunReport
    optimized: RunReport
    overall_ratio: float | None
    category_ratios: dict[str, float | None]
    combined_map_set_ratio: float | None
    behavior_match: bool

    def to_json_dict(self) -> dict:
        return {
            "spec": self.baseline.identity.to_json_dict(),
            "behavior_match": self.behavior_match,
            "ratios": {
                "overall": self.overall_ratio,
                "by_category": {k: self.category_ratios[k] for k in sorted(self.category_ratios)},
                "combined_map_set": self.combined_map_set_ratio,
            },
            "baseline": self.baseline.to_json_dict(),
            "optimized": self.optimized.to_json_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    def render_text(self) -> str:
        def show(ratio: float | None) -> str:
            return "n/a" if ratio is None else f"{ratio:.4f}"

        lines = [
            f"comparison for {self.baseline.identity.name} "
            f"(seed={self.baseline.identity.seed}, scale={self.baseline.identity.scale})",
            f"behavior match: {'yes' if self.behavior_match else 'NO'}",
            "",
            "allocated-byte ratios, optimized/baseline (lower is better):",
        ]
        for name in sorted(self.category_ratios):
            base = self.baseline.ledger.category(name).bytes
            opt = self.optimized.ledger.category(name).bytes
            lines.append(
                f"  {name:<16} {show(self.category_ratios[name]):>8}"
                f"   ({base} -> {opt})"
            )
        base_ms = (
            self.baseline.category_bytes(Category.HASH_MAP)
            + self.baseline.category_bytes(Category.HASH_SET)
        )
        opt_ms = (
            self.optimized.category_bytes(Category.HASH_MAP)
            + self.optimized.category_bytes(Category.HASH_SET)
        )
        lines.append(
            f"  {'MAP+SET':<16} {show(self.combined_map_set_ratio):>8}"
            f"   ({base_ms} -> {opt_ms})"
        )
        lines.append(
            f"  {'OVERALL':<16} {show(self.overall_ratio):>8}"
            f"   ({self.baseline.ledger.overall_bytes} -> {self.optimized.ledger.overall_bytes})"
        )
        return "\n".join(lines)


def compare(baseline: RunReport, optimized: RunReport) -> ComparisonReport:
    """Set an optimized run against its baseline; identities must match."""
    if baseline.identity != optimized.identity:
        raise ReportError(
            f"mismatched spec identities: {baseline.identity} vs {optimized.identity}"
        )
    category_ratios = {
        name: _ratio(optimized.ledger.category(name).bytes, baseline.ledger.category(name).bytes)
        for name in baseline.ledger.categories
    }
    combined = _ratio(
        optimized.category_bytes(Category.HASH_MAP) + optimized.category_bytes(Category.HASH_SET),
        baseline.category_bytes(Category.HASH_MAP) + baseline.category_bytes(Category.HASH_SET),
    )
    return ComparisonReport(
        baseline=baseline,
        optimized=optimized,
        overall_ratio=_ratio(optimized.ledger.overall_bytes, baseline.ledger.overall_bytes),
        category_ratios=category_ratios,
        combined_map_set_ratio=combined,
        behavior_match=baseline.workload_digest == optimized.workload_digest,
    )


# ---------------------------------------------------------------------------
# size-class histograms


def histogram_from_store(store: ProfileStore) -> dict[str, tuple[int, ...]]:
    """Per-kind instance counts per size class, summed over sites."""
    rows = {kind.value: [0] * len(SizeClass) for kind in DsKind}
    for _, profile in store.items():
        row = rows[profile.kind.value]
        for i, count in enumerate(profile.size_class_counts):
            row[i] += count
    return {kind: tuple(counts) for kind, counts in rows.items()}


def histogram(profile_document: str) -> dict[str, tuple[int, ...]]:
    return histogram_from_store(parse(profile_document))


def histogram_to_json_dict(rows: dict[str, tuple[int, ...]]) -> dict:
    labels = [c.label for c in SizeClass]
    return {
        kind: {label: count for label, count in zip(labels, counts)}
        for kind, counts in sorted(rows.items())
    }


def render_histogram_text(rows: dict[str, tuple[int, ...]]) -> str:
    labels = [c.label for c in SizeClass]
    header = f"{'size class':<18}" + "".join(f"{label:>9}" for label in labels)
    lines = ["largest reached size classes (instances per class):", header]
    for kind in sorted(rows):
        counts = rows[kind]
        lines.append(f"{kind:<18}" + "".join(f"{count:>9}" for count in counts))
    return "\n".join(lines)
