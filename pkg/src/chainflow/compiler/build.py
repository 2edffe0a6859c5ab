"""Full-mode compilation: one interpretable contract per reusable scope."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..bpmn import EventKind, FlowNode, NodeKind, ProcessModel, validate_model
from .classify import ElementClass, classify
from .hierarchy import ScopeNode, split_hierarchy
from .indexing import IndexAssignment, assign_indexes
from .ir import (
    AnyContract,
    Catcher,
    CompilationDictionary,
    CompiledContract,
    DictionaryContract,
    DictionaryElement,
    ExternalBinding,
    KillEntry,
    PropagationPlan,
    ReusableBinding,
    ScopeEntry,
    Transition,
    contract_hash,
)

_RESERVED_NAMES = {
    "marking", "startedActivities", "workitems", "start_execution",
    "handle_event", "broadcast_signal", "terminate_from_parent",
}


class CompileError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        lines = [d.render() if hasattr(d, "render") else str(d) for d in diagnostics]
        super().__init__("compilation failed:\n" + "\n".join(lines))


def compile_model(model: ProcessModel, mode: str = "full"):
    """Compile a model in one of the four modes. Returns (contracts, dictionary);
    contracts[0] is the root contract."""
    diagnostics = validate_model(model)
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        raise CompileError(errors)
    from .baselines import compile_basic, compile_flat
    if mode == "basic":
        return compile_basic(model)
    if mode in ("default", "optimized"):
        return compile_flat(model, mode)
    if mode != "full":
        raise ValueError(f"unknown compilation mode {mode!r}")

    tree = split_hierarchy(model)
    by_hash: dict[str, AnyContract] = {}
    hashes: dict[int, str] = {}
    dictionary = CompilationDictionary(model_name=model.name, mode="full")

    def build(node: ScopeNode) -> str:
        child_hashes = {c.source_node_id: build(c) for c in node.children}
        contract = _build_contract(node, child_hashes)
        h = contract_hash(contract)
        by_hash.setdefault(h, contract)
        hashes[id(node)] = h
        return h

    build(tree)

    ordered: list[AnyContract] = []
    seen: set[str] = set()

    def collect(node: ScopeNode, parent_hash, parent_index):
        h = hashes[id(node)]
        contract = by_hash[h]
        if h not in seen:
            seen.add(h)
            ordered.append(contract)
            dictionary.contracts.append(
                _dictionary_for(node, contract, h, parent_hash, parent_index))
        ia = assign_indexes(node.view)
        for child in node.children:
            collect(child, h, ia.node_index[child.source_node_id])

    collect(tree, None, None)
    return ordered, dictionary


# -- build context ------------------------------------------------------------

def _sanitize(name: str) -> str:
    return "".join(ch for ch in name if ch.isalnum() or ch == "_")


@dataclass
class _Ctx:
    scope_node: ScopeNode
    view: ProcessModel
    ia: IndexAssignment
    classes: dict[str, ElementClass]
    start_id: str
    armed_by: dict[str, Optional[str]] = field(default_factory=dict)
    gateway_groups: dict[str, list[str]] = field(default_factory=dict)
    gateway_members: set[str] = field(default_factory=set)

    def node_by_index(self, index: int) -> FlowNode:
        for node_id, i in self.ia.node_index.items():
            if i == index:
                return self.view.node(node_id)
        raise KeyError(index)


def _view_start(view: ProcessModel) -> FlowNode:
    starts = [n for n in view.nodes if n.kind == NodeKind.START and n.scope is None]
    if len(starts) != 1:
        raise ValueError(f"scope {view.id} needs exactly one start event")
    return starts[0]


def _make_ctx(scope_node: ScopeNode) -> _Ctx:
    view = scope_node.view
    start = _view_start(view)
    ctx = _Ctx(
        scope_node=scope_node,
        view=view,
        ia=assign_indexes(view),
        classes={n.id: classify(n) for n in view.nodes},
        start_id=start.id,
    )
    for n in view.nodes:
        if n.kind == NodeKind.GW_EVENT:
            members = [e.target for e in view.outgoing(n.id)]
            ctx.gateway_groups[n.id] = members
            ctx.gateway_members.update(members)
    # armed message catchers: started not by a token but by their host's start
    for n in view.nodes:
        if n.event_kind != EventKind.MESSAGE:
            continue
        if n.kind == NodeKind.BOUNDARY:
            ctx.armed_by[n.id] = n.attached_to
        elif n.kind == NodeKind.START and n.id != start.id and n.scope is not None:
            scope_node_ = view.node(n.scope)
            if scope_node_.kind == NodeKind.EVENT_SUBPROCESS and scope_node_.interrupting:
                ctx.armed_by[n.id] = scope_node_.scope  # None = armed at instance start
    return ctx


def _started_capable(ctx: _Ctx, node: FlowNode) -> bool:
    if node.id == ctx.start_id:
        return False
    if ctx.classes[node.id] in (ElementClass.EXTERNAL, ElementClass.REUSABLE):
        return True
    return node.id in ctx.armed_by or node.id in ctx.gateway_members


def _armed_bits_of_host(ctx: _Ctx, host_id: Optional[str]) -> int:
    mask = 0
    for nid, by in ctx.armed_by.items():
        if by == host_id:
            mask |= ctx.ia.node_mask(nid)
    return mask


def _arm_indexes_of_host(ctx: _Ctx, host_id: Optional[str]) -> list[int]:
    return sorted(ctx.ia.node_index[nid] for nid, by in ctx.armed_by.items() if by == host_id)


def _member_group_mask(ctx: _Ctx, node_id: str) -> int:
    for members in ctx.gateway_groups.values():
        if node_id in members:
            mask = 0
            for m in members:
                mask |= ctx.ia.node_mask(m)
            return mask
    return 0


def _enclosing_scope_index(ctx: _Ctx, node: FlowNode) -> int:
    scope = node.scope
    while scope is not None:
        scope_node = ctx.view.node(scope)
        if scope_node.kind in (NodeKind.SUBPROCESS, NodeKind.EVENT_SUBPROCESS):
            return ctx.ia.node_index[scope]
        scope = scope_node.scope
    return 0


def _unique_name(base: str, index: int, used: set[str]) -> str:
    name = base or f"El{index}"
    if name in used or name in _RESERVED_NAMES:
        name = f"{name}_{index}"
    used.add(name)
    return name


# -- contract assembly ---------------------------------------------------------

def _build_contract(scope_node: ScopeNode, child_hashes: dict[str, str]) -> CompiledContract:
    ctx = _make_ctx(scope_node)
    view, ia = ctx.view, ctx.ia

    contract = CompiledContract(
        scope_id=scope_node.scope_id,
        name=scope_node.name,
        origin=scope_node.origin,
        variables=[(d.type.render(), d.name) for d in view.decls.order],
        enums={k: list(v) for k, v in view.decls.enums.items()},
        word_bits=ia.edge_count,
        node_count=len(view.nodes),
        initial_marking=ia.outgoing_mask(view, ctx.start_id),
        full_edges_mask=ia.full_edges_mask,
    )
    for n in view.nodes:
        if _started_capable(ctx, n):
            contract.started_capable_mask |= ia.node_mask(n.id)
        if n.id in ctx.armed_by:
            contract.armed_mask |= ia.node_mask(n.id)
        contract.scope_of[ia.node_index[n.id]] = _enclosing_scope_index(ctx, n)
    contract.start_arm_indexes = _arm_indexes_of_host(ctx, None)

    _build_scope_tables(ctx, contract)
    _build_bindings(ctx, contract, child_hashes)
    _build_catchers(ctx, contract)
    _build_transitions(ctx, contract)
    _resolve_local_catches(ctx, contract)
    return contract


def _build_scope_tables(ctx: _Ctx, contract: CompiledContract) -> None:
    view, ia = ctx.view, ctx.ia

    def entry_for(scope_id: Optional[str]) -> ScopeEntry:
        index = 0 if scope_id is None else ia.node_index[scope_id]
        subtree = view.nodes if scope_id is None else view.scope_subtree(scope_id)
        edges = view.edges if scope_id is None else view.edges_in_scope_subtree(scope_id)
        entry = ScopeEntry(index=index)
        for e in edges:
            entry.edges_mask |= ia.edge_mask(e.id)
        for n in subtree:
            if n.id == scope_id:
                continue
            if _started_capable(ctx, n):
                entry.started_mask |= ia.node_mask(n.id)
                if n.id not in ctx.armed_by:
                    entry.active_mask |= ia.node_mask(n.id)
            if ctx.classes.get(n.id) == ElementClass.REUSABLE:
                entry.reusable_indexes.append(ia.node_index[n.id])
        entry.reusable_indexes.sort()
        if scope_id is not None:
            entry.outgoing_mask = ia.outgoing_mask(view, scope_id)
            starts = [n for n in view.children_of_scope(scope_id) if n.kind == NodeKind.START]
            if starts:
                entry.initial_mask = ia.outgoing_mask(view, starts[0].id)
        else:
            entry.initial_mask = contract.initial_marking
        return entry

    contract.scope_table[0] = entry_for(None)
    for n in view.nodes:
        if n.kind in (NodeKind.SUBPROCESS, NodeKind.EVENT_SUBPROCESS):
            contract.scope_table[ia.node_index[n.id]] = entry_for(n.id)

    def kill_for(index: int, entry: Optional[ScopeEntry], node: Optional[FlowNode]) -> KillEntry:
        k = KillEntry(index=index)
        if entry is not None:
            k.edges_clear = entry.edges_mask
            k.started_clear = entry.started_mask
            k.reusable_indexes = list(entry.reusable_indexes)
        if node is not None:
            k.started_clear |= ia.node_mask(node.id)
            k.started_clear |= _armed_bits_of_host(ctx, node.id)
            if ctx.classes[node.id] == ElementClass.REUSABLE \
                    and ia.node_index[node.id] not in k.reusable_indexes:
                k.reusable_indexes.append(ia.node_index[node.id])
        return k

    contract.kill_table[0] = kill_for(0, contract.scope_table[0], None)
    for n in view.nodes:
        if n.id == ctx.start_id:
            continue
        idx = ia.node_index[n.id]
        entry = contract.scope_table.get(idx)
        if entry is not None or _started_capable(ctx, n):
            contract.kill_table[idx] = kill_for(idx, entry, n)


def _build_bindings(ctx: _Ctx, contract: CompiledContract, child_hashes: dict[str, str]) -> None:
    view, ia = ctx.view, ctx.ia
    used_names: set[str] = set()
    child_by_source = {c.source_node_id: c for c in ctx.scope_node.children}

    def external_binding(n: FlowNode, produce: int, clear: int) -> ExternalBinding:
        index = ia.node_index[n.id]
        base = _unique_name(_sanitize(n.name), index, used_names)
        a = n.annotation
        binding = ExternalBinding(
            node_index=index, element_id=n.id, name=n.name,
            resource="service" if n.kind == NodeKind.TASK_SERVICE else "worklist",
            start_function=f"{base}_Start",
            checkin_function=base,
            complete_function=f"{base}_Complete",
            exports=[(p.type.render(), p.name) for p in a.exports] if a else [],
            imports=[(p.type.render(), p.name) for p in a.imports] if a else [],
            operations=list(a.operations) if a else [],
            produce_mask=produce,
            started_clear_mask=clear,
        )
        if n.id in ctx.armed_by:
            host = ctx.armed_by[n.id]
            binding.armed_by = ia.node_index[host] if host else 0
            binding.completion = "catcher"
        return binding

    for n in view.nodes:
        if n.id == ctx.start_id:
            continue
        index = ia.node_index[n.id]
        cls = ctx.classes[n.id]

        if cls == ElementClass.EXTERNAL:
            clear = (ia.node_mask(n.id)
                     | _armed_bits_of_host(ctx, n.id)
                     | _member_group_mask(ctx, n.id))
            contract.external[index] = external_binding(
                n, produce=ia.outgoing_mask(view, n.id), clear=clear)
        elif cls == ElementClass.REUSABLE:
            child = child_by_source.get(n.id)
            if child is not None:
                child_hash = child_hashes[n.id]
                child_scope = child.scope_id
            else:
                child_hash = n.called_hash  # bound through registry relations at deployment
                child_scope = n.called_element or n.called_hash or n.id
            mi = n.multi_instance
            contract.reusable[index] = ReusableBinding(
                node_index=index, element_id=n.id, name=n.name,
                child_scope_id=child_scope, child_hash=child_hash,
                multi_instance=("sequential" if mi.sequential else "parallel") if mi else None,
                cardinality=mi.cardinality if mi else None,
                produce_mask=ia.outgoing_mask(view, n.id),
                started_clear_mask=ia.node_mask(n.id) | _armed_bits_of_host(ctx, n.id),
            )
            if n.id in ctx.armed_by:
                # non-interrupting message boundary: check-in spawns the handler
                contract.external[index] = external_binding(n, produce=0, clear=0)


def _build_catchers(ctx: _Ctx, contract: CompiledContract) -> None:
    view, ia = ctx.view, ctx.ia
    child_by_source = {c.source_node_id: c for c in ctx.scope_node.children}
    next_id = 0

    def add(**kwargs) -> Catcher:
        nonlocal next_id
        catcher = Catcher(id=next_id, **kwargs)
        contract.catchers.append(catcher)
        next_id += 1
        return catcher

    for n in sorted(view.nodes, key=lambda x: x.doc_order):
        index = ia.node_index[n.id]
        if n.kind == NodeKind.BOUNDARY:
            host_index = ia.node_index[n.attached_to]
            if n.interrupting:
                catcher = add(
                    node_index=index, element_id=n.id, name=n.name,
                    kind=n.event_kind.value, code=n.code, interrupting=True,
                    attachment="boundary", guard_node=host_index,
                    kill_index=host_index,
                    produce_mask=ia.outgoing_mask(view, n.id))
            else:
                catcher = add(
                    node_index=index, element_id=n.id, name=n.name,
                    kind=n.event_kind.value, code=n.code, interrupting=False,
                    attachment="boundary", guard_node=host_index,
                    spawn_node=index)
            binding = contract.external.get(index)
            if binding is not None and binding.completion == "catcher":
                binding.catcher_id = catcher.id
        elif n.kind == NodeKind.EVENT_SUBPROCESS:
            enclosing = _enclosing_scope_index(ctx, n)
            if n.interrupting:
                starts = [s for s in view.children_of_scope(n.id) if s.kind == NodeKind.START]
                if not starts:
                    continue
                st = starts[0]
                entry = contract.scope_table[index]
                catcher = add(
                    node_index=index, element_id=n.id, name=n.name,
                    kind=st.event_kind.value, code=st.code, interrupting=True,
                    attachment="event_subprocess", guard_node=enclosing,
                    kill_index=enclosing,
                    produce_mask=entry.initial_mask)
                binding = contract.external.get(ia.node_index[st.id])
                if binding is not None and binding.completion == "catcher":
                    binding.catcher_id = catcher.id
                    binding.produce_mask = 0
            else:
                child = child_by_source.get(n.id)
                trigger_kind, trigger_code = EventKind.MESSAGE.value, None
                if child is not None:
                    st = _view_start(child.view)
                    trigger_kind, trigger_code = st.event_kind.value, st.code
                add(node_index=index, element_id=n.id, name=n.name,
                    kind=trigger_kind, code=trigger_code, interrupting=False,
                    attachment="event_subprocess", guard_node=enclosing,
                    spawn_node=index)
        elif n.kind == NodeKind.INTERMEDIATE_CATCH and n.event_kind == EventKind.SIGNAL:
            if n.id in ctx.gateway_members:
                add(node_index=index, element_id=n.id, name=n.name,
                    kind="signal", code=n.code, interrupting=True,
                    attachment="event_gateway",
                    guard_started_mask=ia.node_mask(n.id),
                    clear_mask=_member_group_mask(ctx, n.id),
                    produce_mask=ia.outgoing_mask(view, n.id))
            else:
                add(node_index=index, element_id=n.id, name=n.name,
                    kind="signal", code=n.code, interrupting=True,
                    attachment="intermediate",
                    guard_edge_mask=ia.incoming_mask(view, n.id),
                    produce_mask=ia.outgoing_mask(view, n.id))


def _build_transitions(ctx: _Ctx, contract: CompiledContract) -> None:
    view, ia = ctx.view, ctx.ia

    for n in sorted(view.nodes, key=lambda x: x.doc_order):
        if n.id == ctx.start_id or n.kind in (NodeKind.BOUNDARY, NodeKind.EVENT_SUBPROCESS,
                                              NodeKind.START):
            continue
        if n.id in ctx.gateway_members:
            continue  # started by the event gateway, not by a token
        index = ia.node_index[n.id]
        cls = ctx.classes[n.id]
        incoming = view.incoming(n.id)
        if not incoming:
            continue
        incoming_bits = [ia.edge_mask(e.id) for e in incoming]
        all_bits = 0
        for b in incoming_bits:
            all_bits |= b
        guards = [all_bits] if n.kind == NodeKind.GW_PARALLEL else incoming_bits

        for guard in guards:
            if n.kind == NodeKind.GW_EXCLUSIVE:
                _xor_transitions(ctx, contract, n, guard)
            elif n.kind == NodeKind.GW_PARALLEL:
                contract.transitions.append(Transition(
                    source_index=index, label=n.name,
                    guard_mask=guard, consume_mask=guard,
                    produce_mask=ia.outgoing_mask(view, n.id)))
            elif n.kind == NodeKind.GW_EVENT:
                members = ctx.gateway_groups[n.id]
                started = 0
                arm = []
                for m in members:
                    started |= ia.node_mask(m)
                    if ia.node_index[m] in contract.external:
                        arm.append(ia.node_index[m])
                contract.transitions.append(Transition(
                    source_index=index, label=n.name,
                    guard_mask=guard, consume_mask=guard,
                    started_set_mask=started,
                    action="invokeExternalStart", action_node=index,
                    arm_indexes=sorted(arm)))
            elif cls == ElementClass.EXTERNAL:
                contract.transitions.append(Transition(
                    source_index=index, label=n.name,
                    guard_mask=guard, consume_mask=guard,
                    started_set_mask=ia.node_mask(n.id) | _armed_bits_of_host(ctx, n.id),
                    action="invokeExternalStart", action_node=index,
                    arm_indexes=[index] + _arm_indexes_of_host(ctx, n.id)))
            elif cls == ElementClass.REUSABLE:
                contract.transitions.append(Transition(
                    source_index=index, label=n.name,
                    guard_mask=guard, consume_mask=guard,
                    started_set_mask=ia.node_mask(n.id) | _armed_bits_of_host(ctx, n.id),
                    action="instantiateChild", action_node=index,
                    arm_indexes=_arm_indexes_of_host(ctx, n.id)))
            elif n.kind == NodeKind.TASK_SCRIPT:
                contract.transitions.append(Transition(
                    source_index=index, label=n.name,
                    guard_mask=guard, consume_mask=guard,
                    produce_mask=ia.outgoing_mask(view, n.id),
                    action="runScript", action_node=index,
                    script=list(n.script or [])))
            elif n.kind == NodeKind.SUBPROCESS:  # single-instance: inlined
                entry = contract.scope_table[index]
                contract.transitions.append(Transition(
                    source_index=index, label=n.name,
                    guard_mask=guard, consume_mask=guard,
                    produce_mask=entry.initial_mask,
                    started_set_mask=_armed_bits_of_host(ctx, n.id),
                    action="inlineStartScope", action_node=index,
                    arm_indexes=_arm_indexes_of_host(ctx, n.id)))
            elif n.kind in (NodeKind.END, NodeKind.INTERMEDIATE_THROW):
                _event_transition(ctx, contract, n, guard)
            elif n.kind == NodeKind.INTERMEDIATE_CATCH:
                continue  # signal catch: the token rests until a broadcast
            else:
                raise ValueError(f"cannot compile node kind {n.kind} ({n.id})")


def _xor_transitions(ctx: _Ctx, contract: CompiledContract, n: FlowNode, guard: int) -> None:
    view, ia = ctx.view, ctx.ia
    index = ia.node_index[n.id]
    outgoing = view.outgoing(n.id)
    default = None
    if n.default_flow:
        default = next((e for e in outgoing if e.id == n.default_flow), None)
    if default is None:
        unconditioned = [e for e in outgoing if e.condition is None]
        if len(unconditioned) == 1:
            default = unconditioned[0]
    for edge in outgoing:
        if edge is default or edge.condition is None:
            continue
        contract.transitions.append(Transition(
            source_index=index, label=n.name,
            guard_mask=guard, consume_mask=guard,
            produce_mask=ia.edge_mask(edge.id),
            condition=edge.condition))
    if default is not None:
        contract.transitions.append(Transition(
            source_index=index, label=f"{n.name} (default)",
            guard_mask=guard, consume_mask=guard,
            produce_mask=ia.edge_mask(default.id)))
    else:
        contract.transitions.append(Transition(
            source_index=index, label=f"{n.name} (no branch)",
            guard_mask=guard, consume_mask=guard,
            action="revertNoBranch", action_node=index))


_PATTERN = {
    EventKind.NONE: "SingleUpward",
    EventKind.TERMINATE: "SingleUpward",
    EventKind.ERROR: "Upward",
    EventKind.ESCALATION: "Upward",
    EventKind.SIGNAL: "Broadcast",
    EventKind.MESSAGE: "Outside",
}


def _event_transition(ctx: _Ctx, contract: CompiledContract, n: FlowNode, guard: int) -> None:
    view, ia = ctx.view, ctx.ia
    index = ia.node_index[n.id]
    is_end = n.kind == NodeKind.END
    if not is_end and n.event_kind == EventKind.NONE:
        contract.transitions.append(Transition(
            source_index=index, label=n.name,
            guard_mask=guard, consume_mask=guard,
            produce_mask=ia.outgoing_mask(view, n.id)))
        return
    if index not in contract.event_table:
        contract.event_table[index] = PropagationPlan(
            node_index=index,
            event_kind=n.event_kind.value,
            code=n.code,
            pattern=_PATTERN[n.event_kind],
            scope_index=_enclosing_scope_index(ctx, n),
            produce_mask=0 if is_end else ia.outgoing_mask(view, n.id),
            is_end=is_end,
        )
    contract.transitions.append(Transition(
        source_index=index, label=n.name,
        guard_mask=guard, consume_mask=guard,
        action="throwEvent", action_node=index))


def _resolve_local_catches(ctx: _Ctx, contract: CompiledContract) -> None:
    """Compile-time catch search for error/escalation throws (upward case):
    event subprocesses of each enclosing scope first, then boundary events
    attached to the scope itself, innermost scope outward."""
    view, ia = ctx.view, ctx.ia
    eventsub_by_guard: dict[int, list[Catcher]] = {}
    boundary_by_host: dict[int, list[Catcher]] = {}
    for c in contract.catchers:
        if c.attachment == "event_subprocess":
            eventsub_by_guard.setdefault(c.guard_node, []).append(c)
        elif c.attachment == "boundary":
            boundary_by_host.setdefault(c.guard_node, []).append(c)

    def matches(c: Catcher, kind: str, code) -> bool:
        return c.kind == kind and (c.code is None or c.code == code)

    for plan in contract.event_table.values():
        if plan.pattern != "Upward":
            continue
        throw_node = ctx.node_by_index(plan.node_index)
        chain: list[int] = []
        scope = throw_node.scope
        while scope is not None:
            scope_node = view.node(scope)
            if scope_node.kind in (NodeKind.SUBPROCESS, NodeKind.EVENT_SUBPROCESS):
                chain.append(ia.node_index[scope])
            scope = scope_node.scope
        chain.append(0)
        for scope_index in chain:
            found = next((c for c in eventsub_by_guard.get(scope_index, [])
                          if matches(c, plan.event_kind, plan.code)), None)
            if found is None and scope_index != 0:
                found = next((c for c in boundary_by_host.get(scope_index, [])
                              if matches(c, plan.event_kind, plan.code)), None)
            if found is not None:
                plan.local_catcher = found.id
                break


def _dictionary_for(scope_node: ScopeNode, contract: CompiledContract, h: str,
                    parent_hash, parent_index) -> DictionaryContract:
    view = scope_node.view
    ia = assign_indexes(view)
    dc = DictionaryContract(
        scope_id=scope_node.scope_id, name=scope_node.name, hash=h,
        parent_hash=parent_hash, parent_element_index=parent_index,
        enums={k: list(v) for k, v in view.decls.enums.items()})
    for n in view.nodes:
        index = ia.node_index[n.id]
        binding = contract.external.get(index)
        if binding is not None:
            etype = "SERVICE" if binding.resource == "service" else "WORKITEM"
        elif index in contract.reusable:
            etype = "SEPARATE_INSTANCE"
        else:
            etype = "INTERNAL"
        element = DictionaryElement(
            index=index, element_id=n.id, name=n.name, element_type=etype)
        if binding is not None:
            element.functions = {
                "start": binding.start_function,
                "checkin": binding.checkin_function,
                "complete": binding.complete_function,
            }
            element.exports = list(binding.exports)
            element.imports = list(binding.imports)
        dc.elements[index] = element
    return dc
