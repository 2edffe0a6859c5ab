"""In-memory process graph types."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..guardlang import DeclEnv, Expr, Stmt, VariableDecl


class NodeKind(str, Enum):
    START = "startEvent"
    END = "endEvent"
    INTERMEDIATE_CATCH = "intermediateCatchEvent"
    INTERMEDIATE_THROW = "intermediateThrowEvent"
    BOUNDARY = "boundaryEvent"
    TASK_USER = "userTask"
    TASK_SERVICE = "serviceTask"
    TASK_SCRIPT = "scriptTask"
    TASK_RECEIVE = "receiveTask"
    GW_EXCLUSIVE = "exclusiveGateway"
    GW_PARALLEL = "parallelGateway"
    GW_EVENT = "eventBasedGateway"
    CALL_ACTIVITY = "callActivity"
    SUBPROCESS = "subProcess"
    EVENT_SUBPROCESS = "eventSubProcess"


class EventKind(str, Enum):
    NONE = "none"
    MESSAGE = "message"
    SIGNAL = "signal"
    ERROR = "error"
    ESCALATION = "escalation"
    TERMINATE = "terminate"


TASK_KINDS = {NodeKind.TASK_USER, NodeKind.TASK_SERVICE, NodeKind.TASK_SCRIPT, NodeKind.TASK_RECEIVE}
GATEWAY_KINDS = {NodeKind.GW_EXCLUSIVE, NodeKind.GW_PARALLEL, NodeKind.GW_EVENT}
EVENT_KINDS = {
    NodeKind.START, NodeKind.END, NodeKind.INTERMEDIATE_CATCH,
    NodeKind.INTERMEDIATE_THROW, NodeKind.BOUNDARY,
}
ACTIVITY_KINDS = TASK_KINDS | {NodeKind.CALL_ACTIVITY, NodeKind.SUBPROCESS}


@dataclass
class TaskAnnotation:
    """Data mapping `<exports> : <imports> -> { <operations> }` of a task."""

    exports: list[VariableDecl] = field(default_factory=list)
    imports: list[VariableDecl] = field(default_factory=list)
    operations: list[Stmt] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (self.exports or self.imports or self.operations)


@dataclass
class MultiInstance:
    sequential: bool
    cardinality: Expr


@dataclass
class FlowNode:
    id: str
    name: str
    kind: NodeKind
    event_kind: EventKind = EventKind.NONE
    code: Optional[str] = None
    interrupting: bool = True
    attached_to: Optional[str] = None
    scope: Optional[str] = None  # enclosing subprocess id, None at process root
    multi_instance: Optional[MultiInstance] = None
    annotation: Optional[TaskAnnotation] = None
    script: Optional[list[Stmt]] = None
    called_element: Optional[str] = None
    called_hash: Optional[str] = None
    default_flow: Optional[str] = None
    doc_order: int = 0

    @property
    def is_activity(self) -> bool:
        return self.kind in ACTIVITY_KINDS


@dataclass
class SequenceFlow:
    id: str
    source: str
    target: str
    condition: Optional[Expr] = None
    name: str = ""
    doc_order: int = 0


@dataclass
class ProcessModel:
    id: str
    name: str
    decls: DeclEnv
    nodes: list[FlowNode]
    edges: list[SequenceFlow]
    child_models: dict[str, "ProcessModel"] = field(default_factory=dict)

    @property
    def variables(self) -> list[VariableDecl]:
        return self.decls.order

    @property
    def enums(self) -> dict[str, list[str]]:
        return self.decls.enums

    def node(self, node_id: str) -> FlowNode:
        return self._node_map[node_id]

    @property
    def _node_map(self) -> dict[str, FlowNode]:
        cache = getattr(self, "_node_map_cache", None)
        if cache is None or len(cache) != len(self.nodes):
            cache = {n.id: n for n in self.nodes}
            object.__setattr__(self, "_node_map_cache", cache)
        return cache

    def incoming(self, node_id: str) -> list[SequenceFlow]:
        return [e for e in self.edges if e.target == node_id]

    def outgoing(self, node_id: str) -> list[SequenceFlow]:
        return [e for e in self.edges if e.source == node_id]

    def children_of_scope(self, scope_id: Optional[str]) -> list[FlowNode]:
        return [n for n in self.nodes if n.scope == scope_id]

    def scope_chain(self, node: FlowNode) -> list[Optional[str]]:
        """Enclosing scope ids from the node's own scope up to the root (None)."""
        chain: list[Optional[str]] = []
        scope = node.scope
        while scope is not None:
            chain.append(scope)
            scope = self.node(scope).scope
        chain.append(None)
        return chain

    def scope_subtree(self, scope_id: Optional[str]) -> list[FlowNode]:
        """All nodes strictly inside a scope, including nested subprocess contents."""
        out = []
        for n in self.nodes:
            if n.id == scope_id:
                continue
            if scope_id is None or scope_id in self.scope_chain(n):
                out.append(n)
        return out

    def edges_in_scope_subtree(self, scope_id: Optional[str]) -> list[SequenceFlow]:
        inside = {n.id for n in self.scope_subtree(scope_id)}
        return [e for e in self.edges if e.source in inside and e.target in inside]

    def boundary_events_of(self, node_id: str) -> list[FlowNode]:
        return [n for n in self.nodes if n.kind == NodeKind.BOUNDARY and n.attached_to == node_id]

    def plain_start_of_scope(self, scope_id: Optional[str]) -> Optional[FlowNode]:
        for n in self.children_of_scope(scope_id):
            if n.kind == NodeKind.START and n.event_kind == EventKind.NONE:
                return n
        return None
