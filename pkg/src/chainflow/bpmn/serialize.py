"""Serialization of a ProcessModel back to BPMN 2.0 XML.

The writer emits the same subset the parser accepts, preserving document
order, so parse -> serialize -> parse is a fixed point on supported content.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional

from ..guardlang import to_source
from .annotations import render_annotation
from .model import EventKind, FlowNode, NodeKind, ProcessModel
from .parser import BPMN_NS, EXT_NS

_EVENT_DEF_LOCAL = {
    EventKind.MESSAGE: "messageEventDefinition",
    EventKind.SIGNAL: "signalEventDefinition",
    EventKind.ERROR: "errorEventDefinition",
    EventKind.ESCALATION: "escalationEventDefinition",
    EventKind.TERMINATE: "terminateEventDefinition",
}

_REF_LOCAL = {
    EventKind.MESSAGE: ("message", "messageRef", "name"),
    EventKind.SIGNAL: ("signal", "signalRef", "name"),
    EventKind.ERROR: ("error", "errorRef", "errorCode"),
    EventKind.ESCALATION: ("escalation", "escalationRef", "escalationCode"),
}


def serialize_model(model: ProcessModel) -> bytes:
    """Serialize the model plus all inline child models into one document."""
    ET.register_namespace("", BPMN_NS)
    ET.register_namespace("cf", EXT_NS)
    defs = ET.Element(f"{{{BPMN_NS}}}definitions", {"id": f"defs_{model.id}"})

    codes: dict[tuple[str, str], str] = {}
    emitted: set[str] = set()
    for m in _all_models(model):
        if m.id in emitted:
            continue
        emitted.add(m.id)
        _write_process(defs, m, codes)
    for (kind_value, code), ref_id in sorted(codes.items(), key=lambda kv: kv[1]):
        local, _, attr = _REF_LOCAL[EventKind(kind_value)]
        ET.SubElement(defs, f"{{{BPMN_NS}}}{local}", {"id": ref_id, attr: code})
    return ET.tostring(defs, encoding="utf-8", xml_declaration=True)


def _all_models(model: ProcessModel) -> list[ProcessModel]:
    out = [model]
    for child in model.child_models.values():
        out.extend(_all_models(child))
    return out


def _write_process(defs: ET.Element, model: ProcessModel, codes) -> None:
    proc = ET.SubElement(defs, f"{{{BPMN_NS}}}process",
                         {"id": model.id, "name": model.name})
    decl_lines = []
    for enum, members in model.enums.items():
        decl_lines.append(f"enum {enum} {{{', '.join(members)}}}")
    for var in model.variables:
        decl_lines.append(f"{var.type.render()} {var.name};")
    if decl_lines:
        ET.SubElement(proc, f"{{{BPMN_NS}}}documentation").text = "\n".join(decl_lines)

    items = sorted(model.nodes + model.edges, key=lambda x: x.doc_order)
    containers: dict[Optional[str], ET.Element] = {None: proc}
    for item in items:
        if isinstance(item, FlowNode):
            parent = containers[item.scope]
            el = _write_node(parent, item, codes)
            if item.kind in (NodeKind.SUBPROCESS, NodeKind.EVENT_SUBPROCESS):
                containers[item.id] = el
        else:
            scope = _edge_scope(model, item)
            el = ET.SubElement(containers[scope], f"{{{BPMN_NS}}}sequenceFlow",
                               {"id": item.id, "sourceRef": item.source, "targetRef": item.target})
            if item.name:
                el.set("name", item.name)
            if item.condition is not None:
                ET.SubElement(el, f"{{{BPMN_NS}}}conditionExpression").text = to_source(item.condition)


def _edge_scope(model: ProcessModel, edge) -> Optional[str]:
    return model.node(edge.source).scope


def _write_node(parent: ET.Element, node: FlowNode, codes) -> ET.Element:
    local = "subProcess" if node.kind == NodeKind.EVENT_SUBPROCESS else node.kind.value
    el = ET.SubElement(parent, f"{{{BPMN_NS}}}{local}", {"id": node.id})
    if node.name != node.id:
        el.set("name", node.name)
    if node.kind == NodeKind.EVENT_SUBPROCESS:
        el.set("triggeredByEvent", "true")
    if node.kind == NodeKind.BOUNDARY:
        el.set("attachedToRef", node.attached_to or "")
        if not node.interrupting:
            el.set("cancelActivity", "false")
    if node.kind == NodeKind.START and not node.interrupting:
        el.set("isInterrupting", "false")
    if node.default_flow:
        el.set("default", node.default_flow)
    if node.called_element:
        el.set("calledElement", node.called_element)
    if node.called_hash:
        el.set(f"{{{EXT_NS}}}calledHash", node.called_hash)

    if node.annotation is not None and not node.annotation.is_empty():
        ET.SubElement(el, f"{{{BPMN_NS}}}documentation").text = render_annotation(node.annotation)

    if node.event_kind != EventKind.NONE:
        attrs = {}
        if node.code is not None and node.event_kind in _REF_LOCAL:
            _, ref_attr, _ = _REF_LOCAL[node.event_kind]
            key = (node.event_kind.value, node.code)
            if key not in codes:
                codes[key] = f"{node.event_kind.value}_{node.code}"
            attrs[ref_attr] = codes[key]
        ET.SubElement(el, f"{{{BPMN_NS}}}{_EVENT_DEF_LOCAL[node.event_kind]}", attrs)

    if node.multi_instance is not None:
        mi = ET.SubElement(el, f"{{{BPMN_NS}}}multiInstanceLoopCharacteristics")
        if node.multi_instance.sequential:
            mi.set("isSequential", "true")
        ET.SubElement(mi, f"{{{BPMN_NS}}}loopCardinality").text = to_source(
            node.multi_instance.cardinality)

    if node.script is not None:
        ET.SubElement(el, f"{{{BPMN_NS}}}script").text = " ".join(to_source(s) for s in node.script)

    return el
