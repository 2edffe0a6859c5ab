"""Element classification driving code generation.

External elements interact with a resource contract (worklist or service
bridge), Reusable elements instantiate a separate child contract, everything
else executes inline in the step loop.
"""

from __future__ import annotations

from enum import Enum

from ..bpmn import EventKind, FlowNode, NodeKind


class ElementClass(str, Enum):
    INTERNAL = "Internal"
    EXTERNAL = "External"
    REUSABLE = "Reusable"


def classify(node: FlowNode) -> ElementClass:
    kind = node.kind
    if kind in (NodeKind.TASK_USER, NodeKind.TASK_RECEIVE, NodeKind.TASK_SERVICE):
        return ElementClass.EXTERNAL
    if kind == NodeKind.INTERMEDIATE_CATCH and node.event_kind == EventKind.MESSAGE:
        return ElementClass.EXTERNAL
    if kind == NodeKind.BOUNDARY:
        if not node.interrupting:
            return ElementClass.REUSABLE
        if node.event_kind == EventKind.MESSAGE:
            return ElementClass.EXTERNAL
        return ElementClass.INTERNAL
    if kind == NodeKind.CALL_ACTIVITY:
        return ElementClass.REUSABLE
    if kind == NodeKind.SUBPROCESS:
        return ElementClass.REUSABLE if node.multi_instance else ElementClass.INTERNAL
    if kind == NodeKind.EVENT_SUBPROCESS:
        return ElementClass.INTERNAL if node.interrupting else ElementClass.REUSABLE
    if kind == NodeKind.START and node.event_kind == EventKind.MESSAGE:
        # message start of an inlined event subprocess: armed like a catch task
        return ElementClass.EXTERNAL
    return ElementClass.INTERNAL
