"""Splitting a hierarchical model into one scope view per generated contract.

A scope view is itself a ProcessModel whose nodes/edges are the subset owned
by one contract: the root process, each call-activity target, each
multi-instance subprocess, each non-interrupting event subprocess, and the
subgraph reachable from each non-interrupting boundary event.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from ..bpmn import EventKind, FlowNode, NodeKind, ProcessModel
from .classify import ElementClass, classify


class CyclicCallActivityError(ValueError):
    pass


@dataclass
class ScopeNode:
    scope_id: str
    name: str
    origin: str  # root | call_activity | multi_instance | event_subprocess | boundary
    view: ProcessModel
    source_node_id: Optional[str]  # spawning node id in the parent view
    children: list["ScopeNode"] = field(default_factory=list)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


def split_hierarchy(model: ProcessModel) -> ScopeNode:
    return _split(model, "root", model.id, None, ())


def _split(model: ProcessModel, origin: str, scope_id: str,
           source_node_id: Optional[str], call_path: tuple) -> ScopeNode:
    if model.id in call_path:
        raise CyclicCallActivityError(
            " -> ".join(call_path + (model.id,)))
    handler_of = _handler_assignment(model)
    anchors = {n.id: _anchor(model, n, handler_of) for n in model.nodes}

    root_view = _build_view(model, None, anchors, scope_id)
    node = ScopeNode(scope_id=scope_id, name=model.name, origin=origin,
                     view=root_view, source_node_id=source_node_id)
    node.children = _children_for(model, None, anchors, call_path)
    return node


def _children_for(model: ProcessModel, anchor_key: Optional[str],
                  anchors: dict, call_path: tuple) -> list[ScopeNode]:
    children: list[ScopeNode] = []
    view_nodes = [n for n in model.nodes if anchors[n.id] == anchor_key]
    for n in sorted(view_nodes, key=lambda x: x.doc_order):
        cls = classify(n)
        if cls != ElementClass.REUSABLE:
            continue
        if n.kind == NodeKind.CALL_ACTIVITY:
            target = model.child_models.get(n.id)
            if target is None:
                continue  # hash-referenced: resolved at deployment
            child = _split(target, "call_activity", target.id, n.id,
                           call_path + (model.id,))
            children.append(child)
        else:
            origin = {
                NodeKind.SUBPROCESS: "multi_instance",
                NodeKind.EVENT_SUBPROCESS: "event_subprocess",
                NodeKind.BOUNDARY: "boundary",
            }[n.kind]
            view = _build_view(model, n.id, anchors, n.id)
            child = ScopeNode(scope_id=n.id, name=n.name, origin=origin,
                              view=view, source_node_id=n.id)
            child.children = _children_for(model, n.id, anchors, call_path)
            children.append(child)
    return children


def _handler_assignment(model: ProcessModel) -> dict[str, str]:
    """Map each node owned by a non-interrupting boundary handler to the
    boundary event's id. Subgraphs are followed through edges, expanding
    internal subprocess contents, without descending into reusable scopes."""
    out: dict[str, str] = {}
    for boundary in model.nodes:
        if boundary.kind != NodeKind.BOUNDARY or boundary.interrupting:
            continue
        seen: set[str] = set()
        stack = [e.target for e in model.outgoing(boundary.id)]
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            node = model.node(nid)
            stack.extend(e.target for e in model.outgoing(nid))
            stack.extend(b.id for b in model.boundary_events_of(nid))
            if node.kind in (NodeKind.SUBPROCESS, NodeKind.EVENT_SUBPROCESS) \
                    and classify(node) == ElementClass.INTERNAL:
                stack.extend(x.id for x in model.scope_subtree(nid))
        for nid in seen:
            out[nid] = boundary.id
    return out


def _anchor(model: ProcessModel, node: FlowNode, handler_of: dict) -> Optional[str]:
    """The owning contract scope of a node: nearest enclosing reusable
    subprocess, else its boundary handler, else the root (None)."""
    if node.kind == NodeKind.BOUNDARY:
        return _anchor(model, model.node(node.attached_to), handler_of) \
            if node.attached_to else None
    scope = node.scope
    while scope is not None:
        scope_node = model.node(scope)
        if classify(scope_node) == ElementClass.REUSABLE:
            return scope
        scope = scope_node.scope
    return handler_of.get(node.id)


def _build_view(model: ProcessModel, anchor_key: Optional[str],
                anchors: dict, scope_id: str) -> ProcessModel:
    nodes: list[FlowNode] = []
    in_view: set[str] = set()
    for n in sorted(model.nodes, key=lambda x: x.doc_order):
        if anchors[n.id] != anchor_key:
            continue
        in_view.add(n.id)
        nodes.append(n)

    # re-scope: enclosing scopes outside the view become the view root
    rescoped: list[FlowNode] = []
    for n in nodes:
        scope = n.scope
        if anchor_key is not None and scope == anchor_key:
            scope = None
        if scope is not None and scope not in in_view:
            scope = None
        rescoped.append(dataclasses.replace(n, scope=scope))
    nodes = rescoped

    edges = [e for e in sorted(model.edges, key=lambda x: x.doc_order)
             if e.source in in_view and e.target in in_view]

    boundary_origin = (anchor_key is not None
                       and model.node(anchor_key).kind == NodeKind.BOUNDARY)
    if boundary_origin:
        boundary = model.node(anchor_key)
        synthetic = FlowNode(
            id=f"{boundary.id}__entry", name=boundary.name,
            kind=NodeKind.START, event_kind=EventKind.NONE,
            scope=None, doc_order=0,
        )
        nodes = [synthetic] + nodes
        entry_edges = [dataclasses.replace(e, source=synthetic.id)
                       for e in sorted(model.outgoing(boundary.id), key=lambda x: x.doc_order)
                       if e.target in in_view]
        edges = entry_edges + edges

    view = ProcessModel(
        id=scope_id,
        name=model.node(anchor_key).name if anchor_key else model.name,
        decls=model.decls,
        nodes=nodes,
        edges=edges,
        child_models={k: v for k, v in model.child_models.items() if k in in_view},
    )
    return view
