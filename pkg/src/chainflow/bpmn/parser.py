"""BPMN 2.0 XML parsing for the supported element subset."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional

from ..guardlang import DeclEnv, GuardSyntaxError, parse_declarations, parse_expr, parse_stmts
from .annotations import parse_annotation
from .errors import (
    BpmnError,
    DanglingReferenceError,
    UnsupportedElementError,
    XmlSyntaxError,
)
from .model import EventKind, FlowNode, MultiInstance, NodeKind, ProcessModel, SequenceFlow

BPMN_NS = "http://www.omg.org/spec/BPMN/20100524/MODEL"
EXT_NS = "urn:chainflow"


def _tag(local: str) -> str:
    return f"{{{BPMN_NS}}}{local}"


_NODE_TAGS = {
    "startEvent": NodeKind.START,
    "endEvent": NodeKind.END,
    "intermediateCatchEvent": NodeKind.INTERMEDIATE_CATCH,
    "intermediateThrowEvent": NodeKind.INTERMEDIATE_THROW,
    "boundaryEvent": NodeKind.BOUNDARY,
    "userTask": NodeKind.TASK_USER,
    "serviceTask": NodeKind.TASK_SERVICE,
    "scriptTask": NodeKind.TASK_SCRIPT,
    "receiveTask": NodeKind.TASK_RECEIVE,
    "exclusiveGateway": NodeKind.GW_EXCLUSIVE,
    "parallelGateway": NodeKind.GW_PARALLEL,
    "eventBasedGateway": NodeKind.GW_EVENT,
    "callActivity": NodeKind.CALL_ACTIVITY,
    "subProcess": NodeKind.SUBPROCESS,
}

_EVENT_DEF_TAGS = {
    "messageEventDefinition": EventKind.MESSAGE,
    "signalEventDefinition": EventKind.SIGNAL,
    "errorEventDefinition": EventKind.ERROR,
    "escalationEventDefinition": EventKind.ESCALATION,
    "terminateEventDefinition": EventKind.TERMINATE,
}

# Elements that are legal BPMN but out of the supported subset: report, never drop.
_REJECTED_TAGS = {
    "inclusiveGateway", "complexGateway", "sendTask", "manualTask", "businessRuleTask",
    "transaction", "adHocSubProcess", "dataObject", "dataObjectReference",
    "dataStoreReference", "standardLoopCharacteristics",
}

_IGNORED_TAGS = {"documentation", "extensionElements", "incoming", "outgoing",
                 "laneSet", "ioSpecification", "multiInstanceLoopCharacteristics",
                 "script", "conditionExpression", "property", "dataInputAssociation",
                 "dataOutputAssociation", "auditing", "monitoring", "category",
                 "textAnnotation", "association"}

_REJECTED_EVENT_DEFS = {"timerEventDefinition", "compensateEventDefinition",
                        "conditionalEventDefinition", "linkEventDefinition",
                        "cancelEventDefinition"}


class _RefTable:
    """Resolves messageRef/signalRef/... into stable event codes."""

    def __init__(self, definitions: ET.Element):
        self.codes: dict[str, str] = {}
        for local, attr in (("message", "name"), ("signal", "name"),
                            ("error", "errorCode"), ("escalation", "escalationCode")):
            for el in definitions.findall(_tag(local)):
                ident = el.get("id")
                if ident:
                    self.codes[ident] = el.get(attr) or ident

    def code_for(self, ref: Optional[str]) -> Optional[str]:
        if not ref:
            return None
        return self.codes.get(ref, ref)


def parse_bpmn(xml: bytes) -> ProcessModel:
    """Parse a definitions document into the root ProcessModel.

    All <process> elements are parsed; call activities may reference sibling
    processes by id. The root is the process no call activity refers to.
    """
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as e:
        raise XmlSyntaxError(f"not well-formed XML: {e}") from e
    if root.tag != _tag("definitions"):
        raise XmlSyntaxError(f"expected <definitions> document, found {root.tag}")

    refs = _RefTable(root)
    models: dict[str, ProcessModel] = {}
    for proc in root.findall(_tag("process")):
        model = _parse_process(proc, refs)
        models[model.id] = model

    if not models:
        raise XmlSyntaxError("document contains no <process>")

    called: set[str] = set()
    for model in models.values():
        for node in model.nodes:
            if node.kind == NodeKind.CALL_ACTIVITY and node.called_element:
                target = models.get(node.called_element)
                if target is None and not node.called_hash:
                    raise DanglingReferenceError(node.id, node.called_element)
                if target is not None:
                    model.child_models[node.id] = target
                    called.add(target.id)

    roots = [m for pid, m in models.items() if pid not in called]
    if not roots:
        raise BpmnError("call-activity references form a cycle")
    return roots[0]


def _parse_process(proc: ET.Element, refs: _RefTable) -> ProcessModel:
    decls = _parse_variable_block(proc)
    nodes: list[FlowNode] = []
    edges: list[SequenceFlow] = []
    order = iter(range(1, 1 << 20))
    _parse_scope(proc, None, decls, refs, nodes, edges, order)

    ids: set[str] = set()
    for n in nodes:
        if n.id in ids:
            raise BpmnError(f"duplicate node id {n.id}")
        ids.add(n.id)
    for e in edges:
        if e.id in ids:
            raise BpmnError(f"duplicate id {e.id}")
        ids.add(e.id)
        if e.source not in {n.id for n in nodes}:
            raise DanglingReferenceError(e.id, e.source)
        if e.target not in {n.id for n in nodes}:
            raise DanglingReferenceError(e.id, e.target)
    for n in nodes:
        if n.attached_to is not None and n.attached_to not in {x.id for x in nodes}:
            raise DanglingReferenceError(n.id, n.attached_to)

    return ProcessModel(
        id=proc.get("id") or "process",
        name=proc.get("name") or proc.get("id") or "process",
        decls=decls,
        nodes=nodes,
        edges=edges,
    )


def _parse_variable_block(proc: ET.Element) -> DeclEnv:
    doc = proc.find(_tag("documentation"))
    text = (doc.text or "") if doc is not None else ""
    try:
        return parse_declarations(text)
    except GuardSyntaxError as e:
        raise BpmnError(f"invalid variable declarations: {e}") from e


def _parse_scope(container: ET.Element, scope: Optional[str], decls: DeclEnv,
                 refs: _RefTable, nodes: list[FlowNode], edges: list[SequenceFlow],
                 order) -> None:
    for el in container:
        local = el.tag.split("}")[-1]
        if el.tag != _tag(local):
            continue  # foreign-namespace elements pass through
        if local in _IGNORED_TAGS:
            continue
        if local == "sequenceFlow":
            edges.append(_parse_edge(el, next(order)))
            continue
        if local in _REJECTED_TAGS:
            raise UnsupportedElementError(local, el.get("id") or "?")
        kind = _NODE_TAGS.get(local)
        if kind is None:
            raise UnsupportedElementError(local, el.get("id") or "?")
        node = _parse_node(el, local, kind, scope, decls, refs, next(order))
        nodes.append(node)
        if node.kind in (NodeKind.SUBPROCESS, NodeKind.EVENT_SUBPROCESS):
            _parse_scope(el, node.id, decls, refs, nodes, edges, order)


def _parse_edge(el: ET.Element, order: int) -> SequenceFlow:
    cond_el = el.find(_tag("conditionExpression"))
    condition = None
    if cond_el is not None and (cond_el.text or "").strip():
        try:
            condition = parse_expr(cond_el.text.strip())
        except GuardSyntaxError as e:
            raise BpmnError(f"invalid condition on {el.get('id')}: {e}") from e
    return SequenceFlow(
        id=el.get("id") or f"flow{order}",
        source=el.get("sourceRef") or "",
        target=el.get("targetRef") or "",
        condition=condition,
        name=el.get("name") or "",
        doc_order=order,
    )


def _parse_node(el: ET.Element, local: str, kind: NodeKind, scope: Optional[str],
                decls: DeclEnv, refs: _RefTable, order: int) -> FlowNode:
    node_id = el.get("id") or f"node{order}"
    node = FlowNode(
        id=node_id,
        name=el.get("name") or node_id,
        kind=kind,
        scope=scope,
        doc_order=order,
    )

    if kind == NodeKind.SUBPROCESS and el.get("triggeredByEvent") == "true":
        node.kind = NodeKind.EVENT_SUBPROCESS

    if kind in (NodeKind.START, NodeKind.END, NodeKind.INTERMEDIATE_CATCH,
                NodeKind.INTERMEDIATE_THROW, NodeKind.BOUNDARY):
        _parse_event_definition(el, node, refs)

    if kind == NodeKind.BOUNDARY:
        node.attached_to = el.get("attachedToRef")
        node.interrupting = el.get("cancelActivity", "true") != "false"
    if kind == NodeKind.START:
        node.interrupting = el.get("isInterrupting", "true") != "false"

    if kind in (NodeKind.GW_EXCLUSIVE, NodeKind.GW_EVENT):
        node.default_flow = el.get("default")

    if kind == NodeKind.CALL_ACTIVITY:
        node.called_element = el.get("calledElement")
        node.called_hash = el.get(f"{{{EXT_NS}}}calledHash")

    mi = el.find(_tag("multiInstanceLoopCharacteristics"))
    if mi is not None:
        card_el = mi.find(_tag("loopCardinality"))
        if card_el is None or not (card_el.text or "").strip():
            raise BpmnError(f"multi-instance marker on {node_id} lacks loopCardinality")
        try:
            cardinality = parse_expr(card_el.text.strip())
        except GuardSyntaxError as e:
            raise BpmnError(f"invalid cardinality on {node_id}: {e}") from e
        node.multi_instance = MultiInstance(
            sequential=mi.get("isSequential") == "true",
            cardinality=cardinality,
        )

    if kind == NodeKind.TASK_SCRIPT:
        script_el = el.find(_tag("script"))
        text = (script_el.text or "") if script_el is not None else ""
        try:
            node.script = parse_stmts(text)
        except GuardSyntaxError as e:
            raise BpmnError(f"invalid script on {node_id}: {e}") from e

    if kind in (NodeKind.TASK_USER, NodeKind.TASK_SERVICE, NodeKind.TASK_RECEIVE) \
            or (kind in (NodeKind.INTERMEDIATE_CATCH, NodeKind.BOUNDARY, NodeKind.START)
                and node.event_kind == EventKind.MESSAGE):
        doc = el.find(_tag("documentation"))
        text = (doc.text or "") if doc is not None else ""
        try:
            node.annotation = parse_annotation(text, decls)
        except BpmnError as e:
            raise BpmnError(f"invalid annotation on {node_id}: {e}") from e

    return node


def _parse_event_definition(el: ET.Element, node: FlowNode, refs: _RefTable) -> None:
    for child in el:
        local = child.tag.split("}")[-1]
        if local in _REJECTED_EVENT_DEFS:
            raise UnsupportedElementError(local, node.id)
        ev = _EVENT_DEF_TAGS.get(local)
        if ev is None:
            continue
        node.event_kind = ev
        ref_attr = {"message": "messageRef", "signal": "signalRef",
                    "error": "errorRef", "escalation": "escalationRef"}.get(ev.value)
        if ref_attr:
            node.code = refs.code_for(child.get(ref_attr))
        return
