"""A miniature graph IR demonstrating the compile-time allocation rewrite.

The graph is a linear control chain (START -> ... -> END) whose nodes may
consume values through data edges. Rewriting an allocation retypes the
ALLOC node, retargets its constructor invocation to the replacement's
counterpart with identical argument wiring, and turns every direct call on
that receiver into a virtual call. Nothing else changes, so dumps before
and after differ only in those three places.

Dump format, one node per line, sorted by id::

    <id>: <KIND>(<payload>[ @ <ctx>]) [-> <succ>][ | recv=%<id>[ args=<operand>, ...]]

Operands starting with ``%`` reference producer nodes; anything else is an
opaque literal token.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping

from .engine import (
    COMPATIBLE_DECISIONS,
    DecisionKind,
    ReplacementDecision,
    ReplacementPlan,
    all_replacement_type_names,
    primitive_list,
    replacement_type_name,
)
from .profiles import DsKind, PRIMITIVE_TAGS, SiteId


class IrError(Exception):
    """Structural or rewrite error in the miniature IR."""


class IrParseError(IrError):
    """A graph dump that cannot be parsed back."""


class NodeKind(Enum):
    START = "START"
    END = "END"
    ALLOC = "ALLOC"
    INVOKE_CONSTRUCTOR = "INVOKE_CONSTRUCTOR"
    INVOKE_DIRECT = "INVOKE_DIRECT"
    INVOKE_VIRTUAL = "INVOKE_VIRTUAL"


_INVOKE_KINDS = frozenset(
    {NodeKind.INVOKE_CONSTRUCTOR, NodeKind.INVOKE_DIRECT, NodeKind.INVOKE_VIRTUAL}
)

#: Data operand: a node reference (int) or an opaque literal token (str).
Operand = int | str


@dataclass(frozen=True)
class IrNode:
    node_id: int
    kind: NodeKind
    payload: str = ""
    receiver: int | None = None
    args: tuple[Operand, ...] = ()
    successor: int | None = None
    site: SiteId | None = None  # ALLOC nodes may carry a site label

    def render(self) -> str:
        head = f"{self.node_id}: {self.kind.value}"
        if self.kind is NodeKind.ALLOC:
            label = self.payload if self.site is None else f"{self.payload} @ {self.site.ctx}"
            head += f"({label})"
        elif self.kind in _INVOKE_KINDS:
            head += f"({self.payload})"
        if self.successor is not None:
            head += f" -> {self.successor}"
        if self.receiver is not None:
            head += f" | recv=%{self.receiver}"
            if self.args:
                rendered = ", ".join(
                    f"%{a}" if isinstance(a, int) else str(a) for a in self.args
                )
                head += f" args={rendered}"
        return head


@dataclass(frozen=True)
class IrGraph:
    nodes: Mapping[int, IrNode]

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        starts = [n for n in self.nodes.values() if n.kind is NodeKind.START]
        ends = [n for n in self.nodes.values() if n.kind is NodeKind.END]
        if len(starts) != 1 or len(ends) != 1:
            raise IrError("graph needs exactly one START and one END")
        # the control chain must run START -> ... -> END without revisits
        seen = set()
        node = starts[0]
        while node.kind is not NodeKind.END:
            if node.node_id in seen:
                raise IrError(f"control cycle through node {node.node_id}")
            seen.add(node.node_id)
            if node.successor is None:
                raise IrError(f"node {node.node_id} has no control successor")
            successor = self.nodes.get(node.successor)
            if successor is None:
                raise IrError(f"node {node.node_id} points to missing node {node.successor}")
            node = successor
        for node in self.nodes.values():
            if node.receiver is not None and node.receiver not in self.nodes:
                raise IrError(f"node {node.node_id} uses missing receiver %{node.receiver}")
            for arg in node.args:
                if isinstance(arg, int) and arg not in self.nodes:
                    raise IrError(f"node {node.node_id} uses missing operand %{arg}")

    def node(self, node_id: int) -> IrNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise IrError(f"no node with id {node_id}") from None

    def allocations(self) -> list[IrNode]:
        return [n for n in sorted(self.nodes.values(), key=lambda n: n.node_id)
                if n.kind is NodeKind.ALLOC]

    def constructor_for(self, alloc_id: int) -> IrNode | None:
        for node in sorted(self.nodes.values(), key=lambda n: n.node_id):
            if node.kind is NodeKind.INVOKE_CONSTRUCTOR and node.receiver == alloc_id:
                return node
        return None

    def with_nodes(self, replacements: dict[int, IrNode]) -> IrGraph:
        updated = dict(self.nodes)
        updated.update(replacements)
        return IrGraph(updated)


def dump(graph: IrGraph) -> str:
    return "\n".join(
        node.render() for node in sorted(graph.nodes.values(), key=lambda n: n.node_id)
    )


def _parse_operand(token: str) -> Operand:
    if token.startswith("%"):
        ref = token[1:]
        if not ref.isdigit():
            raise IrParseError(f"bad node reference {token!r}")
        return int(ref)
    return token


def parse_graph(text: str) -> IrGraph:
    """Parse a graph dump; the format round-trips through :func:`dump`."""
    nodes: dict[int, IrNode] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, data = line.partition(" | ")
        if " -> " in head:
            head, successor_text = head.rsplit(" -> ", 1)
            if not successor_text.strip().isdigit():
                raise IrParseError(f"line {lineno}: bad successor {successor_text!r}")
            successor = int(successor_text)
        else:
            successor = None
        id_text, sep, kind_payload = head.partition(": ")
        if not sep or not id_text.strip().isdigit():
            raise IrParseError(f"line {lineno}: expected '<id>: <KIND>...'")
        node_id = int(id_text)
        kind_payload = kind_payload.strip()
        if "(" in kind_payload:
            if not kind_payload.endswith(")"):
                raise IrParseError(f"line {lineno}: unbalanced payload parentheses")
            kind_name, payload = kind_payload.split("(", 1)
            payload = payload[:-1]
        else:
            kind_name, payload = kind_payload, ""
        try:
            kind = NodeKind(kind_name)
        except ValueError:
            raise IrParseError(f"line {lineno}: unknown node kind {kind_name!r}") from None

        site = None
        if kind is NodeKind.ALLOC and " @ " in payload:
            payload, _, ctx = payload.partition(" @ ")
            try:
                site = SiteId.from_ctx(ctx)
            except ValueError as exc:
                raise IrParseError(f"line {lineno}: {exc}") from exc

        receiver = None
        args: tuple[Operand, ...] = ()
        if data:
            if not data.startswith("recv=%"):
                raise IrParseError(f"line {lineno}: data edges must start with recv=%<id>")
            recv_part, _, args_part = data.partition(" args=")
            ref = recv_part[len("recv=%"):]
            if not ref.isdigit():
                raise IrParseError(f"line {lineno}: bad receiver {recv_part!r}")
            receiver = int(ref)
            if args_part:
                args = tuple(_parse_operand(tok.strip()) for tok in args_part.split(","))

        if node_id in nodes:
            raise IrParseError(f"line {lineno}: duplicate node id {node_id}")
        nodes[node_id] = IrNode(
            node_id=node_id,
            kind=kind,
            payload=payload,
            receiver=receiver,
            args=args,
            successor=successor,
            site=site,
        )
    if not nodes:
        raise IrParseError("empty graph")
    try:
        return IrGraph(nodes)
    except IrError as exc:
        raise IrParseError(str(exc)) from exc


# ---------------------------------------------------------------------------
# type catalog and rewriting


@dataclass(frozen=True)
class CatalogEntry:
    kind: DsKind
    replacements: frozenset[str]
    constructor_arities: frozenset[int] = frozenset({0, 1})


@dataclass(frozen=True)
class TypeCatalog:
    """Original types, their kinds, and the replacement types they admit.

    Replacement types keep the original constructors, so an original's
    constructor arity set applies to all of its replacements.
    """

    originals: Mapping[str, CatalogEntry]
    replacement_names: frozenset[str] = field(default_factory=frozenset)

    def entry(self, type_name: str) -> CatalogEntry:
        try:
            return self.originals[type_name]
        except KeyError:
            raise IrError(f"no catalog entry for type {type_name!r}") from None


def _default_catalog() -> TypeCatalog:
    def names_for(kind: DsKind) -> frozenset[str]:
        names = set()
        for decision_kind in COMPATIBLE_DECISIONS[kind]:
            if decision_kind is DecisionKind.KEEP:
                continue
            if decision_kind is DecisionKind.PRIMITIVE_LIST:
                names.update(
                    replacement_type_name(kind, primitive_list(tag)) for tag in PRIMITIVE_TAGS
                )
            else:
                names.add(replacement_type_name(kind, ReplacementDecision(decision_kind)))
        return frozenset(names)

    originals = {
        "HashMap": CatalogEntry(DsKind.HASH_MAP, names_for(DsKind.HASH_MAP)),
        "LinkedHashMap": CatalogEntry(DsKind.LINKED_HASH_MAP, names_for(DsKind.LINKED_HASH_MAP)),
        "HashSet": CatalogEntry(DsKind.HASH_SET, names_for(DsKind.HASH_SET)),
        "ArrayList": CatalogEntry(DsKind.ARRAY_LIST, names_for(DsKind.ARRAY_LIST)),
    }
    return TypeCatalog(originals=originals, replacement_names=all_replacement_type_names())


DEFAULT_CATALOG = _default_catalog()


def rewrite_allocation(
    graph: IrGraph,
    alloc_id: int,
    replacement_type: str,
    catalog: TypeCatalog = DEFAULT_CATALOG,
) -> IrGraph:
    """Retype one allocation, retarget its constructor, virtualize its calls."""
    alloc = graph.node(alloc_id)
    if alloc.kind is not NodeKind.ALLOC:
        raise IrError(f"node {alloc_id} is {alloc.kind.value}, not an allocation")
    entry = catalog.entry(alloc.payload)
    if replacement_type not in entry.replacements:
        raise IrError(
            f"{replacement_type!r} is not a registered replacement for {alloc.payload!r}"
        )
    constructor = graph.constructor_for(alloc_id)
    if constructor is None:
        raise IrError(f"allocation {alloc_id} has no constructor invocation")
    if len(constructor.args) not in entry.constructor_arities:
        raise IrError(
            f"constructor of node {alloc_id} takes {len(constructor.args)} arguments, "
            f"which {alloc.payload!r} does not declare"
        )

    changes: dict[int, IrNode] = {
        alloc_id: replace(alloc, payload=replacement_type),
        constructor.node_id: replace(constructor, payload=f"{replacement_type}.<init>"),
    }
    for node in graph.nodes.values():
        if node.kind is NodeKind.INVOKE_DIRECT and node.receiver == alloc_id:
            changes[node.node_id] = replace(node, kind=NodeKind.INVOKE_VIRTUAL)
    return graph.with_nodes(changes)


def apply_plan(
    graph: IrGraph, plan: ReplacementPlan, catalog: TypeCatalog = DEFAULT_CATALOG
) -> IrGraph:
    """Rewrite every labeled allocation whose plan decision is not KEEP.

    Already-rewritten allocations are left alone, so the pass is idempotent.
    """
    result = graph
    for alloc in graph.allocations():
        if alloc.site is None:
            continue
        if alloc.payload in catalog.replacement_names:
            continue
        entry = plan.decisions.get(alloc.site)
        if entry is None or entry.decision.kind is DecisionKind.KEEP:
            continue
        catalog_entry = catalog.entry(alloc.payload)
        if catalog_entry.kind is not entry.kind:
            raise IrError(
                f"allocation {alloc.node_id} is a {alloc.payload}, but the plan "
                f"decides {alloc.site.ctx} as {entry.kind.value}"
            )
        result = rewrite_allocation(
            result,
            alloc.node_id,
            replacement_type_name(entry.kind, entry.decision),
            catalog,
        )
    return result


def fig_style_example_graph(ctx: str = "Foo.bar(): 4") -> IrGraph:
    """The canonical three-node rewrite target: alloc, constructor, put."""
    site = SiteId.from_ctx(ctx)
    nodes = {
        0: IrNode(0, NodeKind.START, successor=1),
        1: IrNode(1, NodeKind.ALLOC, payload="HashMap", successor=2, site=site),
        2: IrNode(2, NodeKind.INVOKE_CONSTRUCTOR, payload="HashMap.<init>",
                  receiver=1, successor=3),
        3: IrNode(3, NodeKind.INVOKE_DIRECT, payload="HashMap.put",
                  receiver=1, args=('"key"', '"val"'), successor=4),
        4: IrNode(4, NodeKind.END),
    }
    return IrGraph(nodes)
