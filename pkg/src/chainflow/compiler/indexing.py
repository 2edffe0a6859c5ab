"""Sequential index assignment over one contract scope.

Nodes take indexes 1.. in document order (index 0 names the process itself),
edges take 0.. in document order; every mask is one bit in a 256-bit word.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..bpmn import ProcessModel

WORD_BITS = 256


class CapacityExceededError(ValueError):
    pass


@dataclass
class IndexAssignment:
    node_index: dict[str, int] = field(default_factory=dict)
    edge_index: dict[str, int] = field(default_factory=dict)

    def node_mask(self, node_id: str) -> int:
        return 1 << self.node_index[node_id]

    def edge_mask(self, edge_id: str) -> int:
        return 1 << self.edge_index[edge_id]

    def incoming_mask(self, model: ProcessModel, node_id: str) -> int:
        mask = 0
        for e in model.incoming(node_id):
            mask |= self.edge_mask(e.id)
        return mask

    def outgoing_mask(self, model: ProcessModel, node_id: str) -> int:
        mask = 0
        for e in model.outgoing(node_id):
            mask |= self.edge_mask(e.id)
        return mask

    @property
    def full_edges_mask(self) -> int:
        mask = 0
        for i in self.edge_index.values():
            mask |= 1 << i
        return mask

    @property
    def edge_count(self) -> int:
        return len(self.edge_index)


def assign_indexes(view: ProcessModel, scope=None) -> IndexAssignment:
    """Deterministic document-order assignment for one scope view.

    The optional `scope` restricts assignment to a sub-scope of the view;
    the default covers the whole view (the usual, one-view-per-contract case).
    """
    nodes = view.nodes if scope is None else view.scope_subtree(scope)
    edges = view.edges if scope is None else view.edges_in_scope_subtree(scope)
    if len(nodes) > WORD_BITS - 1:
        raise CapacityExceededError(
            f"{len(nodes)} nodes exceed the {WORD_BITS}-bit started-set word")
    if len(edges) > WORD_BITS:
        raise CapacityExceededError(
            f"{len(edges)} edges exceed the {WORD_BITS}-bit marking word")
    ia = IndexAssignment()
    for i, node in enumerate(sorted(nodes, key=lambda n: n.doc_order), start=1):
        ia.node_index[node.id] = i
    for i, edge in enumerate(sorted(edges, key=lambda e: e.doc_order)):
        ia.edge_index[edge.id] = i
    return ia
