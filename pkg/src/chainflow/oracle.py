"""Brute-force token-game interpretation of flat process models.

This module is the independent reference for the compiled engine: it walks
the process graph directly (no bit encoding, no ledger) and is used both to
enumerate reachable states for equivalence checking and to replay traces for
conformance certification.

Supported here: flat models built from user/script tasks, exclusive and
parallel gateways, plain start/end events.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .bpmn import NodeKind, ProcessModel
from .guardlang import Revert, VarEnv, coerce_value, eval_expr, exec_stmts

_FLAT_KINDS = {
    NodeKind.START, NodeKind.END, NodeKind.TASK_USER, NodeKind.TASK_SCRIPT,
    NodeKind.GW_EXCLUSIVE, NodeKind.GW_PARALLEL,
}


def _require_flat(model: ProcessModel) -> None:
    for n in model.nodes:
        if n.kind not in _FLAT_KINDS or n.scope is not None:
            raise ValueError(f"oracle supports flat models only, found {n.kind} ({n.id})")


@dataclass(frozen=True)
class TokenState:
    """Committed state: tokens on edges plus started external tasks."""

    tokens: frozenset
    started: frozenset


def enumerate_reachable(model: ProcessModel) -> set[TokenState]:
    """All committed (tokens, started) states under free-choice gateway
    semantics and arbitrary interleaving of task completions."""
    _require_flat(model)
    start = model.plain_start_of_scope(None)
    initial = (frozenset(e.id for e in model.outgoing(start.id)), frozenset())
    seen: set[TokenState] = set()
    frontier = list(_close(model, initial[0], initial[1]))
    while frontier:
        state = frontier.pop()
        if state in seen:
            continue
        seen.add(state)
        for task_id in state.started:
            produced = frozenset(e.id for e in model.outgoing(task_id))
            for nxt in _close(model, state.tokens | produced, state.started - {task_id}):
                if nxt not in seen:
                    frontier.append(nxt)
    return seen


def _close(model: ProcessModel, tokens: frozenset, started: frozenset) -> set[TokenState]:
    """Fire internal elements to quiescence, branching on every exclusive
    gateway choice. Consumption is target-driven, so the closure is confluent
    up to those choices."""
    out: set[TokenState] = set()
    stack = [(tokens, started)]
    while stack:
        toks, strt = stack.pop()
        fired = False
        for node in model.nodes:
            incoming = [e.id for e in model.incoming(node.id)]
            if node.kind == NodeKind.TASK_USER:
                hit = next((e for e in incoming if e in toks), None)
                if hit is not None:
                    stack.append((toks - {hit}, strt | {node.id}))
                    fired = True
                    break
            elif node.kind == NodeKind.GW_PARALLEL:
                if incoming and all(e in toks for e in incoming):
                    outgoing = {e.id for e in model.outgoing(node.id)}
                    stack.append((toks - set(incoming) | outgoing, strt))
                    fired = True
                    break
            elif node.kind in (NodeKind.GW_EXCLUSIVE, NodeKind.TASK_SCRIPT, NodeKind.END):
                hit = next((e for e in incoming if e in toks), None)
                if hit is None:
                    continue
                base = toks - {hit}
                if node.kind == NodeKind.GW_EXCLUSIVE:
                    for edge in model.outgoing(node.id):
                        stack.append((base | {edge.id}, strt))
                elif node.kind == NodeKind.TASK_SCRIPT:
                    stack.append((base | {e.id for e in model.outgoing(node.id)}, strt))
                else:
                    stack.append((base, strt))
                fired = True
                break
        if not fired:
            out.add(TokenState(frozenset(toks), frozenset(strt)))
    return out


class NoBranchEnabled(Revert):
    def __init__(self, node_id: str):
        super().__init__(f"no enabled branch out of exclusive gateway {node_id}")


class TraceRunner:
    """Deterministic, data-aware execution of a flat model, mirroring the
    compiled step semantics: document-order firing, restart after each firing,
    first true condition wins, default edge as fallback."""

    def __init__(self, model: ProcessModel):
        _require_flat(model)
        self.model = model
        self.env = VarEnv.initial(model.decls)
        start = model.plain_start_of_scope(None)
        self.tokens: set = set()
        self.started: set = set()
        self._by_name: dict[str, str] = {n.name: n.id for n in model.nodes
                                         if n.kind == NodeKind.TASK_USER}
        self.tokens = {e.id for e in model.outgoing(start.id)}
        self._close()

    def is_finished(self) -> bool:
        return not self.tokens and not self.started

    def started_tasks(self) -> list[str]:
        return sorted(self.model.node(n).name for n in self.started)

    def try_event(self, task_name: str, inputs: Optional[dict] = None) -> bool:
        """Attempt a completion. Returns False (state unchanged) when the task
        is not started or its operations revert."""
        node_id = self._by_name.get(task_name)
        if node_id is None or node_id not in self.started:
            return False
        node = self.model.node(node_id)
        snapshot = (set(self.tokens), set(self.started), dict(self.env.values))
        try:
            annotation = node.annotation
            if annotation is not None:
                args = {}
                for p in annotation.imports:
                    raw = (inputs or {}).get(p.name)
                    if raw is None:
                        raise Revert(f"missing input {p.name}")
                    args[p.name] = coerce_value(p.type, raw, self.model.decls)
                scoped = self.env.child(self.model.decls.extended(annotation.imports), args)
                result = exec_stmts(annotation.operations, scoped)
                self.env = VarEnv(self.model.decls,
                                  {k: v for k, v in result.values.items()
                                   if k in self.model.decls.variables})
            self.started.discard(node_id)
            self.tokens |= {e.id for e in self.model.outgoing(node_id)}
            self._close()
            return True
        except Revert:
            self.tokens, self.started, values = snapshot
            self.env = VarEnv(self.model.decls, values)
            return False

    def _close(self) -> None:
        progress = True
        while progress:
            progress = False
            for node in self.model.nodes:
                incoming = [e.id for e in self.model.incoming(node.id)]
                if node.kind == NodeKind.TASK_USER:
                    hit = next((e for e in incoming if e in self.tokens), None)
                    if hit is not None:
                        self.tokens.discard(hit)
                        self.started.add(node.id)
                        progress = True
                        break
                elif node.kind == NodeKind.GW_PARALLEL:
                    if incoming and all(e in self.tokens for e in incoming):
                        self.tokens -= set(incoming)
                        self.tokens |= {e.id for e in self.model.outgoing(node.id)}
                        progress = True
                        break
                elif node.kind == NodeKind.GW_EXCLUSIVE:
                    hit = next((e for e in incoming if e in self.tokens), None)
                    if hit is None:
                        continue
                    self.tokens.discard(hit)
                    self.tokens.add(self._pick_branch(node).id)
                    progress = True
                    break
                elif node.kind == NodeKind.TASK_SCRIPT:
                    hit = next((e for e in incoming if e in self.tokens), None)
                    if hit is not None:
                        self.tokens.discard(hit)
                        if node.script:
                            self.env = exec_stmts(node.script, self.env)
                        self.tokens |= {e.id for e in self.model.outgoing(node.id)}
                        progress = True
                        break
                elif node.kind == NodeKind.END:
                    hit = next((e for e in incoming if e in self.tokens), None)
                    if hit is not None:
                        self.tokens.discard(hit)
                        progress = True
                        break

    def _pick_branch(self, node):
        default = None
        for edge in self.model.outgoing(node.id):
            if edge.id == node.default_flow or edge.condition is None:
                default = default or edge
                continue
            if eval_expr(edge.condition, self.env):
                return edge
        if default is None:
            raise NoBranchEnabled(node.id)
        return default


def conforms(model: ProcessModel, trace: list) -> bool:
    """A trace conforms when every event completes a started task and the
    instance finishes. Events are (name, inputs) pairs."""
    runner = TraceRunner(model)
    for name, inputs in trace:
        if not runner.try_event(name, inputs):
            return False
    return runner.is_finished()
