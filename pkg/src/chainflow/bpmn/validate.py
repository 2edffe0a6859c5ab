"""Structural and typing diagnostics over a parsed model."""

from __future__ import annotations

from dataclasses import dataclass

from ..guardlang import GuardTypeError, UINT, BOOL, check_expr
from .model import (
    EventKind,
    FlowNode,
    NodeKind,
    ProcessModel,
)

WORD_LIMIT = 256


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # error | warning
    code: str
    message: str
    element_id: str

    def render(self) -> str:
        return f"{self.severity}: {self.message} @ {self.element_id}"


def validate_model(model: ProcessModel) -> list[Diagnostic]:
    """Returns an empty list iff the model (plus inline children) is compilable."""
    out: list[Diagnostic] = []
    seen: set[str] = set()
    _validate_one(model, out, seen)
    return out


def _validate_one(model: ProcessModel, out: list[Diagnostic], seen: set[str]) -> None:
    if model.id in seen:
        return
    seen.add(model.id)

    def err(code: str, message: str, element_id: str) -> None:
        out.append(Diagnostic("error", code, message, element_id))

    if len(model.edges) > WORD_LIMIT:
        err("TooManyEdges",
            f"{len(model.edges)} sequence flows exceed the {WORD_LIMIT}-bit state word", model.id)
    if len(model.nodes) > WORD_LIMIT - 1:
        err("TooManyNodes",
            f"{len(model.nodes)} nodes exceed the {WORD_LIMIT}-bit state word", model.id)

    node_ids = {n.id for n in model.nodes}
    scopes: list[tuple[str | None, FlowNode | None]] = [(None, None)]
    scopes += [(n.id, n) for n in model.nodes
               if n.kind in (NodeKind.SUBPROCESS, NodeKind.EVENT_SUBPROCESS)]

    for scope_id, scope_node in scopes:
        direct = model.children_of_scope(scope_id)
        plain = [n for n in direct if n.kind == NodeKind.START and n.event_kind == EventKind.NONE]
        typed = [n for n in direct if n.kind == NodeKind.START and n.event_kind != EventKind.NONE]
        if scope_node is not None and scope_node.kind == NodeKind.EVENT_SUBPROCESS:
            if len(typed) != 1 or plain:
                err("BadEventSubprocessStart",
                    "event subprocess needs exactly one typed start event", scope_id or model.id)
        else:
            if len(plain) != 1:
                err("BadStartEvent",
                    f"scope needs exactly one plain start event, found {len(plain)}",
                    scope_id or model.id)
            if typed:
                err("BadStartEvent", "typed start events only open event subprocesses",
                    typed[0].id)

    for node in model.nodes:
        incoming = model.incoming(node.id)
        outgoing = model.outgoing(node.id)

        if node.kind == NodeKind.BOUNDARY:
            if node.attached_to is None or node.attached_to not in node_ids:
                err("BadBoundary", "boundary event must attach to an existing activity", node.id)
            if incoming:
                err("BadBoundary", "boundary event cannot have incoming flows", node.id)
            if node.attached_to in node_ids:
                host = model.node(node.attached_to)
                if not host.is_activity:
                    err("BadBoundary", "boundary events attach to activities only", node.id)
                elif host.scope != node.scope:
                    err("BadBoundary", "boundary event must share its host's scope", node.id)
            if node.event_kind == EventKind.NONE:
                err("BadBoundary", "boundary event needs an event definition", node.id)
        elif node.kind == NodeKind.EVENT_SUBPROCESS:
            if incoming or outgoing:
                err("BadEventSubprocess", "event subprocess has no sequence flows", node.id)
        elif node.kind == NodeKind.START:
            if incoming:
                err("BadStartEvent", "start event cannot have incoming flows", node.id)
            if len(outgoing) != 1:
                err("BadStartEvent", "start event needs exactly one outgoing flow", node.id)
        elif node.kind == NodeKind.END:
            if outgoing:
                err("BadEndEvent", "end event cannot have outgoing flows", node.id)
            if not incoming:
                err("BadEndEvent", "end event needs an incoming flow", node.id)
        else:
            if not incoming and node.kind != NodeKind.EVENT_SUBPROCESS:
                err("Unreachable", "node has no incoming flow", node.id)
            if not outgoing and node.kind not in (NodeKind.END,):
                err("DeadEnd", "node has no outgoing flow", node.id)

        if node.multi_instance is not None:
            if node.kind not in (NodeKind.CALL_ACTIVITY, NodeKind.SUBPROCESS):
                err("BadMultiInstance",
                    "multi-instance markers only apply to call activities and subprocesses",
                    node.id)
            else:
                try:
                    t = check_expr(node.multi_instance.cardinality, model.decls)
                    if t != UINT:
                        err("BadCardinality", "cardinality must be a uint expression", node.id)
                except GuardTypeError as e:
                    err("BadCardinality", f"cardinality: {e}", node.id)

        if node.kind == NodeKind.GW_EXCLUSIVE and len(outgoing) > 1:
            for edge in outgoing:
                if edge.condition is None and edge.id != node.default_flow:
                    err("MissingGuard",
                        f"unguarded non-default flow {edge.id} out of exclusive gateway", node.id)
        if node.kind == NodeKind.GW_EVENT:
            if len(outgoing) < 2:
                err("BadEventGateway", "event-based gateway needs at least two successors", node.id)
            for edge in outgoing:
                succ = model.node(edge.target)
                ok = succ.kind == NodeKind.TASK_RECEIVE or (
                    succ.kind == NodeKind.INTERMEDIATE_CATCH
                    and succ.event_kind in (EventKind.MESSAGE, EventKind.SIGNAL))
                if not ok:
                    err("BadEventGateway",
                        "event-based gateway successors must be catching events or receive tasks",
                        succ.id)
                elif len(model.incoming(succ.id)) != 1:
                    err("BadEventGateway",
                        "an event-gateway successor cannot have other incoming flows", succ.id)

        if node.default_flow and node.default_flow not in {e.id for e in outgoing}:
            err("BadDefaultFlow", "default flow is not an outgoing flow of the gateway", node.id)

        if node.kind == NodeKind.INTERMEDIATE_CATCH and node.event_kind not in (
                EventKind.MESSAGE, EventKind.SIGNAL):
            err("BadCatchEvent", "intermediate catch supports message and signal only", node.id)
        if node.kind == NodeKind.INTERMEDIATE_THROW and node.event_kind not in (
                EventKind.MESSAGE, EventKind.SIGNAL, EventKind.ESCALATION, EventKind.NONE):
            err("BadThrowEvent",
                "intermediate throw supports message, signal and escalation", node.id)

        if node.kind == NodeKind.CALL_ACTIVITY:
            if node.id not in model.child_models and not node.called_hash:
                err("MissingCallTarget", "call activity has no resolvable target", node.id)

        if node.script is not None:
            for stmt in node.script:
                try:
                    from ..guardlang.typecheck import check_stmt
                    check_stmt(stmt, model.decls)
                except GuardTypeError as e:
                    err("BadScript", f"script: {e}", node.id)

    for edge in model.edges:
        if edge.condition is not None:
            source = model.node(edge.source)
            if source.kind != NodeKind.GW_EXCLUSIVE:
                err("BadCondition",
                    "conditions are supported on exclusive-gateway outgoing flows only", edge.id)
            else:
                try:
                    t = check_expr(edge.condition, model.decls)
                    if t != BOOL:
                        err("BadCondition", "condition must be boolean", edge.id)
                except GuardTypeError as e:
                    err("BadCondition", f"condition: {e}", edge.id)
        src = model.node(edge.source)
        tgt = model.node(edge.target)
        src_scope = src.scope if src.kind != NodeKind.BOUNDARY else src.scope
        if src_scope != tgt.scope and src.kind != NodeKind.BOUNDARY:
            err("CrossScopeFlow", "sequence flows cannot cross subprocess borders", edge.id)

    # non-interrupting boundary handlers must be flow-disjoint from the main graph
    for node in model.nodes:
        if node.kind == NodeKind.BOUNDARY and not node.interrupting:
            handler = _reachable_from(model, node.id)
            start = model.plain_start_of_scope(None)
            if start is not None:
                main = _reachable_from(model, start.id)
                overlap = (handler - {node.id}) & main
                if overlap:
                    err("SharedHandlerFlow",
                        "non-interrupting boundary handler rejoins the main flow", node.id)

    for child in model.child_models.values():
        _validate_one(child, out, seen)


def _reachable_from(model: ProcessModel, node_id: str) -> set[str]:
    seen: set[str] = set()
    stack = [node_id]
    while stack:
        current = stack.pop()
        if current in seen:
            continue
        seen.add(current)
        for edge in model.outgoing(current):
            stack.append(edge.target)
    return seen
