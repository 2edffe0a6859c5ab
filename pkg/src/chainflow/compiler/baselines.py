"""The three baseline compilation modes used for cost comparisons.

Basic records event references without enforcing anything. Default compiles a
single flat contract enforcing control flow plus gateway data. Optimized is
Default with state compression: only edges on which a token can rest between
transactions keep a bit; runs through purely internal elements are folded into
the producing operation at compile time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..bpmn import FlowNode, NodeKind, ProcessModel
from ..guardlang import Binary, Expr, Var
from .build import _sanitize, _unique_name
from .indexing import assign_indexes
from .ir import (
    CompilationDictionary,
    DictionaryContract,
    DictionaryElement,
    FlatContract,
    FlatOp,
    FlatTransition,
    RecorderContract,
    contract_hash,
    serialize_contract,
)

_MANUAL_KINDS = {NodeKind.TASK_USER, NodeKind.TASK_SERVICE, NodeKind.TASK_RECEIVE}
_FLAT_KINDS = _MANUAL_KINDS | {
    NodeKind.START, NodeKind.END, NodeKind.TASK_SCRIPT,
    NodeKind.GW_EXCLUSIVE, NodeKind.GW_PARALLEL,
}


class FlatteningError(ValueError):
    pass


def compile_basic(model: ProcessModel):
    contract = RecorderContract(scope_id=model.id, name=model.name)
    h = contract_hash(contract)
    dictionary = CompilationDictionary(model_name=model.name, mode="basic")
    dc = DictionaryContract(scope_id=model.id, name=model.name, hash=h,
                            parent_hash=None, parent_element_index=None)
    ia = assign_indexes(model)
    for n in model.nodes:
        if n.kind in _MANUAL_KINDS:
            dc.elements[ia.node_index[n.id]] = DictionaryElement(
                index=ia.node_index[n.id], element_id=n.id, name=n.name,
                element_type="WORKITEM", functions={"checkin": "record"})
    dictionary.contracts.append(dc)
    return [contract], dictionary


def compile_flat(model: ProcessModel, mode: str):
    for n in model.nodes:
        if n.kind not in _FLAT_KINDS or n.scope is not None:
            raise FlatteningError(
                f"{mode} mode supports flat models only; {n.id} is {n.kind.value}")
    default = _build_default(model)
    contract = default
    if mode == "optimized":
        try:
            optimized = _build_optimized(model)
            if len(serialize_contract(optimized)) < len(serialize_contract(default)):
                contract = optimized
            else:
                contract = _relabel(default, "optimized")
        except FlatteningError:
            contract = _relabel(default, "optimized")
    dictionary = _flat_dictionary(model, contract, mode)
    return [contract], dictionary


def _relabel(contract: FlatContract, mode: str) -> FlatContract:
    import dataclasses
    return dataclasses.replace(contract, mode=mode)


def _condition_variables(model: ProcessModel) -> set[str]:
    names: set[str] = set()

    def walk(e: Expr):
        if isinstance(e, Var):
            names.add(e.name)
        elif isinstance(e, Binary):
            walk(e.left)
            walk(e.right)
        elif hasattr(e, "operand"):
            walk(e.operand)

    for edge in model.edges:
        if edge.condition is not None:
            walk(edge.condition)
    return names


def _relevant_assignments(stmts, relevant: set[str]):
    from ..guardlang.ast import Assign
    return [s for s in stmts if isinstance(s, Assign) and s.target in relevant]


def _build_default(model: ProcessModel) -> FlatContract:
    ia = assign_indexes(model)
    relevant = _condition_variables(model)
    start = model.plain_start_of_scope(None)
    contract = FlatContract(
        scope_id=model.id, name=model.name, mode="default",
        variables=[(d.type.render(), d.name) for d in model.decls.order
                   if d.name in relevant],
        enums={k: list(v) for k, v in model.decls.enums.items()},
        word_bits=len(model.edges),
        initial_marking=ia.outgoing_mask(model, start.id),
    )
    used: set[str] = set()
    for n in sorted(model.nodes, key=lambda x: x.doc_order):
        index = ia.node_index[n.id]
        incoming_bits = [ia.edge_mask(e.id) for e in model.incoming(n.id)]
        if n.kind == NodeKind.START or not incoming_bits:
            continue
        if n.kind in _MANUAL_KINDS:
            guard = 0
            for b in incoming_bits:
                guard |= b
            name = _unique_name(_sanitize(n.name), index, used)
            a = n.annotation
            contract.ops[name] = FlatOp(
                name=name, node_index=index, element_id=n.id, element_name=n.name,
                guard_mask=guard,
                imports=[(p.type.render(), p.name) for p in a.imports] if a else [],
                operations=_relevant_assignments(a.operations, relevant) if a else [],
                variants=[(None, ia.outgoing_mask(model, n.id))],
            )
        elif n.kind == NodeKind.GW_PARALLEL:
            guard = 0
            for b in incoming_bits:
                guard |= b
            contract.transitions.append(FlatTransition(
                source_index=index, label=n.name, guard_mask=guard, consume_mask=guard,
                variants=[(None, ia.outgoing_mask(model, n.id))]))
        elif n.kind == NodeKind.GW_EXCLUSIVE:
            variants = _xor_variants(model, ia, n)
            for b in incoming_bits:
                contract.transitions.append(FlatTransition(
                    source_index=index, label=n.name, guard_mask=b, consume_mask=b,
                    variants=list(variants)))
        elif n.kind == NodeKind.TASK_SCRIPT:
            for b in incoming_bits:
                contract.transitions.append(FlatTransition(
                    source_index=index, label=n.name, guard_mask=b, consume_mask=b,
                    variants=[(None, ia.outgoing_mask(model, n.id))],
                    script=_relevant_assignments(n.script or [], relevant)))
        elif n.kind == NodeKind.END:
            for b in incoming_bits:
                contract.transitions.append(FlatTransition(
                    source_index=index, label=n.name, guard_mask=b, consume_mask=b,
                    variants=[(None, 0)]))
    return contract


def _xor_variants(model: ProcessModel, ia, n: FlowNode):
    outgoing = model.outgoing(n.id)
    default = None
    if n.default_flow:
        default = next((e for e in outgoing if e.id == n.default_flow), None)
    if default is None:
        unconditioned = [e for e in outgoing if e.condition is None]
        if len(unconditioned) == 1:
            default = unconditioned[0]
    variants: list[tuple[Optional[Expr], int]] = []
    for edge in outgoing:
        if edge is default or edge.condition is None:
            continue
        variants.append((edge.condition, ia.edge_mask(edge.id)))
    if default is not None:
        variants.append((None, ia.edge_mask(default.id)))
    return variants


# -- optimized mode -----------------------------------------------------------

@dataclass
class _Compression:
    model: ProcessModel
    resting: dict[str, int] = field(default_factory=dict)  # edge id -> bit index

    def mask(self, edge_id: str) -> int:
        return 1 << self.resting[edge_id]


def _is_join(model: ProcessModel, node: FlowNode) -> bool:
    return node.kind == NodeKind.GW_PARALLEL and len(model.incoming(node.id)) >= 2


def _build_optimized(model: ProcessModel) -> FlatContract:
    relevant = _condition_variables(model)
    start = model.plain_start_of_scope(None)
    comp = _Compression(model)

    def rests(edge) -> bool:
        target = model.node(edge.target)
        return (target.kind in _MANUAL_KINDS
                or target.kind == NodeKind.TASK_SCRIPT
                or _is_join(model, target))

    entry_edges = model.outgoing(start.id)
    bit = 0
    for edge in sorted(model.edges, key=lambda e: e.doc_order):
        if rests(edge) or edge in entry_edges:
            comp.resting[edge.id] = bit
            bit += 1

    contract = FlatContract(
        scope_id=model.id, name=model.name, mode="optimized",
        variables=[(d.type.render(), d.name) for d in model.decls.order
                   if d.name in relevant],
        enums={k: list(v) for k, v in model.decls.enums.items()},
        word_bits=bit,
        initial_marking=0,
    )
    for edge in entry_edges:
        contract.initial_marking |= comp.mask(edge.id)

    used: set[str] = set()
    ia = assign_indexes(model)
    for n in sorted(model.nodes, key=lambda x: x.doc_order):
        index = ia.node_index[n.id]
        incoming = model.incoming(n.id)
        if n.kind == NodeKind.START:
            for edge in model.outgoing(n.id):
                if not rests(edge):
                    # entry token must flow through internal elements on start
                    contract.transitions.append(FlatTransition(
                        source_index=index, label=f"{n.name} (entry)",
                        guard_mask=comp.mask(edge.id), consume_mask=comp.mask(edge.id),
                        variants=_closure(comp, [edge.id], skip_rest={edge.id})))
            continue
        if n.kind in _MANUAL_KINDS:
            guard = 0
            for e in incoming:
                if e.id in comp.resting:
                    guard |= comp.mask(e.id)
            name = _unique_name(_sanitize(n.name), index, used)
            a = n.annotation
            contract.ops[name] = FlatOp(
                name=name, node_index=index, element_id=n.id, element_name=n.name,
                guard_mask=guard,
                imports=[(p.type.render(), p.name) for p in a.imports] if a else [],
                operations=_relevant_assignments(a.operations, relevant) if a else [],
                variants=_closure(comp, [e.id for e in model.outgoing(n.id)]),
            )
        elif _is_join(model, n):
            guard = 0
            for e in incoming:
                guard |= comp.mask(e.id)
            contract.transitions.append(FlatTransition(
                source_index=index, label=n.name, guard_mask=guard, consume_mask=guard,
                variants=_closure(comp, [e.id for e in model.outgoing(n.id)])))
        elif n.kind == NodeKind.TASK_SCRIPT:
            for e in incoming:
                contract.transitions.append(FlatTransition(
                    source_index=index, label=n.name,
                    guard_mask=comp.mask(e.id), consume_mask=comp.mask(e.id),
                    variants=_closure(comp, [x.id for x in model.outgoing(n.id)]),
                    script=_relevant_assignments(n.script or [], relevant)))
        # exclusive gateways, splits and end events fold into closures
    return contract


def _closure(comp: _Compression, edge_ids: list[str], skip_rest: Optional[set] = None):
    """Fold token flow through internal elements into (condition, mask)
    variants over resting bits, ordered depth-first with each gateway's
    conditioned edges before its default."""
    model = comp.model
    variants: list[tuple[Optional[Expr], int]] = []
    limit = 512

    def walk(pending: tuple, mask: int, conds: tuple, path: frozenset):
        if len(variants) > limit:
            raise FlatteningError("closure variant explosion")
        if not pending:
            variants.append((_conjoin(conds), mask))
            return
        edge_id, rest = pending[0], pending[1:]
        if edge_id in comp.resting and not (skip_rest and edge_id in skip_rest):
            walk(rest, mask | comp.mask(edge_id), conds, path)
            return
        if edge_id in path:
            raise FlatteningError(f"internal cycle through {edge_id}")
        edge = next(e for e in model.edges if e.id == edge_id)
        target = model.node(edge.target)
        if target.kind == NodeKind.END:
            walk(rest, mask, conds, path)
        elif target.kind == NodeKind.GW_PARALLEL:  # split (joins rest earlier)
            outgoing = tuple(e.id for e in model.outgoing(target.id))
            walk(outgoing + rest, mask, conds, path | {edge_id})
        elif target.kind == NodeKind.GW_EXCLUSIVE:
            outgoing = model.outgoing(target.id)
            default = None
            if target.default_flow:
                default = next((e for e in outgoing if e.id == target.default_flow), None)
            if default is None:
                unconditioned = [e for e in outgoing if e.condition is None]
                if len(unconditioned) == 1:
                    default = unconditioned[0]
            for out in outgoing:
                if out is default or out.condition is None:
                    continue
                walk((out.id,) + rest, mask, conds + (out.condition,), path | {edge_id})
            if default is not None:
                walk((default.id,) + rest, mask, conds, path | {edge_id})
        else:
            raise FlatteningError(f"unexpected closure target {target.kind}")

    walk(tuple(edge_ids), 0, (), frozenset())
    return variants


def _conjoin(conds: tuple) -> Optional[Expr]:
    if not conds:
        return None
    result = conds[0]
    for c in conds[1:]:
        result = Binary("&&", result, c)
    return result


def _flat_dictionary(model: ProcessModel, contract: FlatContract, mode: str):
    h = contract_hash(contract)
    dictionary = CompilationDictionary(model_name=model.name, mode=mode)
    dc = DictionaryContract(scope_id=model.id, name=model.name, hash=h,
                            parent_hash=None, parent_element_index=None,
                            enums={k: list(v) for k, v in model.decls.enums.items()})
    for op in contract.ops.values():
        dc.elements[op.node_index] = DictionaryElement(
            index=op.node_index, element_id=op.element_id, name=op.element_name,
            element_type="WORKITEM", functions={"checkin": op.name},
            imports=list(op.imports))
    dictionary.contracts.append(dc)
    return dictionary
