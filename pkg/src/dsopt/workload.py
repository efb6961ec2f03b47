"""Declarative synthetic workloads and their deterministic execution.

A workload spec lists allocation sites, each with an instance count and
per-instance distributions for target size, reads, entry iterations, and
overwrites (plus element tags for lists). Distributions materialize into
exact quotas (largest-remainder rounding) shuffled by a seeded generator,
so a 2 % weight over 1000 instances yields exactly 20 — runs are fully
deterministic given (spec, seed, scale).

Execution streams every observable operation result into a digest; a
baseline run and an optimized run of the same spec must produce the same
digest, which is how behavioral equivalence is checked end to end.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass

from .baseline import BaselineLinkedMap, BaselineList, BaselineMap, BaselineSet
from .costmodel import LayoutConstants, DEFAULT_CONSTANTS
from .engine import ReplacementPlan, site_factory
from .profiles import DsKind, ElementTypeTag, SiteId
from .runtime import Runtime
from .values import Value, stable_hash

_MASK64 = (1 << 64) - 1


class WorkloadError(Exception):
    """Invalid workload spec or a spec/profile mismatch."""


@dataclass(frozen=True)
class Distribution:
    """Discrete distribution materialized as exact quotas."""

    values: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values or len(self.values) != len(self.weights):
            raise WorkloadError("distribution needs matching, non-empty values and weights")
        if any(w < 0 for w in self.weights) or sum(self.weights) <= 0:
            raise WorkloadError("distribution weights must be non-negative and sum > 0")
        if any(v < 0 for v in self.values):
            raise WorkloadError("distribution values must be non-negative")

    @classmethod
    def fixed(cls, value: int) -> Distribution:
        return cls((value,), (1.0,))

    @classmethod
    def from_json(cls, data) -> Distribution:
        if isinstance(data, int):
            return cls.fixed(data)
        if isinstance(data, dict):
            return cls(tuple(data["values"]), tuple(data["weights"]))
        raise WorkloadError(f"cannot read a distribution from {data!r}")

    def to_json(self):
        if len(self.values) == 1:
            return self.values[0]
        return {"values": list(self.values), "weights": list(self.weights)}

    def materialize(self, n: int, rng: random.Random) -> list[int]:
        """Exactly n draws with largest-remainder quotas, order shuffled."""
        total_weight = sum(self.weights)
        exact = [n * w / total_weight for w in self.weights]
        quotas = [int(x) for x in exact]
        remainders = sorted(
            range(len(exact)), key=lambda i: (quotas[i] - exact[i], i)
        )  # most-underserved first
        for i in range(n - sum(quotas)):
            quotas[remainders[i]] += 1
        draws = [v for v, q in zip(self.values, quotas) for _ in range(q)]
        rng.shuffle(draws)
        return draws


_ZERO = Distribution.fixed(0)


@dataclass(frozen=True)
class SiteWorkload:
    """Behavior program for one allocation site."""

    site: SiteId
    kind: DsKind
    instances: int
    sizes: Distribution = _ZERO
    gets: Distribution = _ZERO
    entry_iterations: Distribution = _ZERO
    overwrites: Distribution = _ZERO
    element_tags: tuple[ElementTypeTag, ...] = (ElementTypeTag.OBJECT,)
    initial_capacity: int | None = None

    def __post_init__(self) -> None:
        if self.instances < 0:
            raise WorkloadError("instance count must be >= 0")
        if self.kind is DsKind.ARRAY_LIST and not self.element_tags:
            raise WorkloadError("list sites need at least one element tag")


@dataclass(frozen=True)
class WorkloadSpec:
    name: str
    seed: int
    sites: tuple[SiteWorkload, ...]
    default_profile_scale: float = 0.5

    def __post_init__(self) -> None:
        contexts = [sw.site.ctx for sw in self.sites]
        if len(set(contexts)) != len(contexts):
            raise WorkloadError(f"duplicate site contexts in spec {self.name!r}")

    def to_json(self) -> str:
        sites = []
        for sw in self.sites:
            record = {
                "ctx": sw.site.ctx,
                "kind": sw.kind.value,
                "instances": sw.instances,
                "sizes": sw.sizes.to_json(),
                "gets": sw.gets.to_json(),
                "entry_iterations": sw.entry_iterations.to_json(),
                "overwrites": sw.overwrites.to_json(),
            }
            if sw.kind is DsKind.ARRAY_LIST:
                record["element_tags"] = [t.name for t in sw.element_tags]
            if sw.initial_capacity is not None:
                record["initial_capacity"] = sw.initial_capacity
            sites.append(record)
        document = {
            "name": self.name,
            "seed": self.seed,
            "default_profile_scale": self.default_profile_scale,
            "sites": sites,
        }
        return json.dumps(document, indent=2)

    @classmethod
    def from_json(cls, document: str) -> WorkloadSpec:
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise WorkloadError(f"malformed workload spec: {exc}") from exc
        try:
            sites = []
            for record in data["sites"]:
                tags = tuple(
                    ElementTypeTag[name] for name in record.get("element_tags", ["OBJECT"])
                )
                sites.append(
                    SiteWorkload(
                        site=SiteId.from_ctx(record["ctx"]),
                        kind=DsKind(record["kind"]),
                        instances=record["instances"],
                        sizes=Distribution.from_json(record.get("sizes", 0)),
                        gets=Distribution.from_json(record.get("gets", 0)),
                        entry_iterations=Distribution.from_json(
                            record.get("entry_iterations", 0)
                        ),
                        overwrites=Distribution.from_json(record.get("overwrites", 0)),
                        element_tags=tags,
                        initial_capacity=record.get("initial_capacity"),
                    )
                )
            return cls(
                name=data["name"],
                seed=data["seed"],
                sites=tuple(sites),
                default_profile_scale=data.get("default_profile_scale", 0.5),
            )
        except (KeyError, ValueError) as exc:
            raise WorkloadError(f"invalid workload spec: {exc}") from exc


def scaled_instances(count: int, scale: float) -> int:
    if scale < 0:
        raise WorkloadError(f"scale must be >= 0, got {scale}")
    return int(round(count * scale))


class _Digest:
    """Order-sensitive stream digest over observable operation results."""

    def __init__(self) -> None:
        self._sha = hashlib.sha256()

    def note(self, *parts: object) -> None:
        self._sha.update("|".join(map(str, parts)).encode())
        self._sha.update(b"\n")

    def hex(self) -> str:
        return self._sha.hexdigest()


def _render(result: Value | None) -> str:
    return "-" if result is None else repr(result.payload)


def _fold_unordered(pairs) -> int:
    acc = 0
    for item in pairs:
        acc = (acc + stable_hash(item)) & _MASK64
    return acc


def _primitive_payload(tag: ElementTypeTag, n: int):
    if tag is ElementTypeTag.BYTE:
        return n % 128
    if tag is ElementTypeTag.SHORT:
        return n % 30000
    if tag is ElementTypeTag.INT:
        return n
    if tag is ElementTypeTag.LONG:
        return n + (1 << 40)
    if tag is ElementTypeTag.FLOAT:
        return n + 0.5
    if tag is ElementTypeTag.DOUBLE:
        return n + 0.25
    if tag is ElementTypeTag.CHAR:
        return chr(65 + n % 26)
    if tag is ElementTypeTag.BOOLEAN:
        return n % 2 == 1
    raise WorkloadError(f"no primitive payload for {tag.name}")


class _SiteRunner:
    """Executes all instances of one site against a collection factory."""

    def __init__(
        self, ordinal: int, seed: int, sw: SiteWorkload, runtime: Runtime, digest: _Digest
    ):
        self.ordinal = ordinal
        self.seed = seed
        self.sw = sw
        self.rt = runtime
        self.digest = digest

    def _element(self, *payload_parts) -> Value:
        """A fresh workload-allocated payload object (charged to the ledger)."""
        self.rt.charge_element_object()
        return Value((self.ordinal, *payload_parts))

    def run(self, n: int, factory) -> None:
        # string seeding hashes via sha512, so this is process-independent
        rng = random.Random(f"{self.seed}|{self.sw.site.ctx}")
        sizes = self.sw.sizes.materialize(n, rng)
        gets = self.sw.gets.materialize(n, rng)
        iterations = self.sw.entry_iterations.materialize(n, rng)
        overwrites = self.sw.overwrites.materialize(n, rng)
        for i in range(n):
            collection = factory(self.sw)
            if self.sw.kind in (DsKind.HASH_MAP, DsKind.LINKED_HASH_MAP):
                self._run_map(collection, i, sizes[i], gets[i], iterations[i], overwrites[i])
            elif self.sw.kind is DsKind.HASH_SET:
                self._run_set(collection, i, sizes[i], gets[i], iterations[i], overwrites[i])
            else:
                self._run_list(collection, i, sizes[i], gets[i], iterations[i], overwrites[i])

    def _run_map(self, m, i, size, gets, iterations, overwrites) -> None:
        note = self.digest.note
        keys = []
        for j in range(size):
            key = self._element(i, j)
            value = self._element(i, j, "v")
            note("put", _render(m.put(key, value)))
            keys.append(key)
        if size > 0:
            for t in range(overwrites):
                value = self._element(i, t, "ow")
                note("ow", _render(m.put(keys[t % size], value)))
        for t in range(gets):
            q = t % (size + 1)
            probe = keys[q] if q < size else Value((self.ordinal, i, size))
            note("get", _render(m.get(probe)))
        ordered = self.sw.kind is DsKind.LINKED_HASH_MAP
        for _ in range(iterations):
            if ordered:
                for key, value in m.entries():
                    note("e", repr(key.payload), repr(value.payload))
            else:
                acc = _fold_unordered((k.payload, v.payload) for k, v in m.entries())
                note("eiter", m.size(), acc)
        note("size", m.size())

    def _run_set(self, s, i, size, gets, iterations, overwrites) -> None:
        note = self.digest.note
        for j in range(size):
            note("add", s.add(self._element(i, j)))
        if size > 0:
            for t in range(overwrites):
                # duplicate adds probe with an equal, uncharged element
                note("dup", s.add(Value((self.ordinal, i, t % size))))
        for t in range(gets):
            q = t % (size + 1)
            note("has", s.contains(Value((self.ordinal, i, q))))
        for _ in range(iterations):
            acc = _fold_unordered(e.payload for e in s)
            note("siter", s.size(), acc)
        note("size", s.size())

    def _run_list(self, lst, i, size, gets, iterations, overwrites) -> None:
        note = self.digest.note
        tags = self.sw.element_tags
        for j in range(size):
            tag = tags[j % len(tags)]
            if tag is ElementTypeTag.OBJECT:
                value = self._element(i, j)
            else:
                value = Value(_primitive_payload(tag, j), tag)
            lst.add(value)
            note("addL", lst.size())
        if size > 0:
            for t in range(overwrites):
                tag = tags[t % len(tags)]
                if tag is ElementTypeTag.OBJECT:
                    value = self._element(i, t, "sw")
                else:
                    value = Value(_primitive_payload(tag, t + size), tag)
                note("setat", _render(lst.set_at(t % size, value)))
            for t in range(gets):
                note("getat", _render(lst.get_at(t % size)))
        for _ in range(iterations):
            for element in lst:
                note("l", repr(element.payload))
        note("size", lst.size())


_BASELINE_CLASSES = {
    DsKind.HASH_MAP: BaselineMap,
    DsKind.LINKED_HASH_MAP: BaselineLinkedMap,
    DsKind.HASH_SET: BaselineSet,
    DsKind.ARRAY_LIST: BaselineList,
}


def execute(
    spec: WorkloadSpec,
    scale: float,
    runtime: Runtime,
    plan: ReplacementPlan | None = None,
) -> str:
    """Run the workload; with a plan, sites construct their planned types.

    Returns the digest over all observable operation results.
    """
    digest = _Digest()
    digest.note("workload", spec.name, spec.seed)
    for ordinal, sw in enumerate(spec.sites):
        if plan is None:
            def factory(site_workload, _rt=runtime):
                cls = _BASELINE_CLASSES[site_workload.kind]
                return cls(_rt, site_workload.site, site_workload.initial_capacity)
        else:
            def factory(site_workload, _rt=runtime, _plan=plan):
                return site_factory(
                    _plan,
                    site_workload.site,
                    site_workload.kind,
                    _rt,
                    site_workload.initial_capacity,
                )
        n = scaled_instances(sw.instances, scale)
        digest.note("site", sw.site.ctx, n)
        _SiteRunner(ordinal, spec.seed, sw, runtime, digest).run(n, factory)
    return digest.hex()


def new_runtime(constants: LayoutConstants = DEFAULT_CONSTANTS) -> Runtime:
    return Runtime(constants)
