"""Execution of compiled process contracts: the step loop, external/reusable
lifecycles, kill semantics and the four event-propagation patterns."""

from __future__ import annotations

from typing import Optional

from ..compiler.ir import Catcher, CompiledContract, ExternalBinding
from ..guardlang import (
    DeclEnv,
    Revert,
    VarEnv,
    VariableDecl,
    coerce_value,
    eval_expr,
    exec_stmts,
)
from ..guardlang.parser import parse_type
from ..ledger.core import NULL_ADDRESS, TxContext

EVENT_DEFAULT = "none"

_READ_ONLY = {
    "marking", "startedActivities", "parent", "instanceIndex", "findWorklist",
    "findService", "findStartedInstances", "variable", "isFinished", "begun",
}


def decl_env_for(contract) -> DeclEnv:
    enums = {k: list(v) for k, v in contract.enums.items()}
    order = [VariableDecl(name, parse_type(type_text, enums))
             for type_text, name in contract.variables]
    return DeclEnv(enums=enums, variables={d.name: d.type for d in order}, order=order)


def params_to_decls(params, enums) -> list[VariableDecl]:
    return [VariableDecl(name, parse_type(type_text, enums))
            for type_text, name in params]


class ProcessVm:
    """One operation invocation on one process-contract instance."""

    def __init__(self, runtime, ctx: TxContext, address: str, contract: CompiledContract):
        self.runtime = runtime
        self.ctx = ctx
        self.address = address
        self.c = contract
        self.decls = runtime.decls_for(contract)

    # -- storage helpers ----------------------------------------------------

    def _get(self, key, default=0):
        return self.ctx.sget(self.address, key, default)

    def _set(self, key, value):
        self.ctx.sset(self.address, key, value)

    def load_env(self) -> VarEnv:
        values = {d.name: self._get(f"var:{d.name}", None) for d in self.decls.order}
        base = VarEnv.initial(self.decls)
        for name, value in values.items():
            if value is not None:
                base.values[name] = value
        return base

    def store_env(self, env: VarEnv) -> None:
        for d in self.decls.order:
            current = self._get(f"var:{d.name}", None)
            new = env.values[d.name]
            if current != new and not (current is None and new == VarEnv.initial(self.decls).values[d.name]):
                self._set(f"var:{d.name}", new)

    def words(self) -> tuple[int, int]:
        return self._get("marking"), self._get("started")

    def commit_words(self, tm: int, ts: int) -> None:
        if self._get("marking") != tm:
            self._set("marking", tm)
        if self._get("started") != ts:
            self._set("started", ts)

    @property
    def parent(self) -> str:
        return self._get("parent", NULL_ADDRESS)

    def children(self) -> list[str]:
        return [self._get(f"children.{i}", NULL_ADDRESS)
                for i in range(self._get("children.length"))]

    def child_started(self, element_index: int) -> int:
        return self._get(f"childStarted:{element_index}")

    # -- entry points --------------------------------------------------------

    def op_start_execution(self) -> None:
        if self._get("begun"):
            raise Revert("AlreadyStarted")
        parent = self.parent
        if parent != NULL_ADDRESS and self.ctx.caller != parent:
            raise Revert("Unauthorized: only the parent starts child instances")
        self._set("begun", 1)
        tm, ts = self._get("marking", self.c.initial_marking), 0
        for index in self.c.start_arm_indexes:
            ts |= 1 << index
        self.commit_words(tm, ts)
        for index in self.c.start_arm_indexes:
            self._start_external(index)
        tm, ts = self.words()
        self.step(tm, ts)

    def op_set_instance_index(self, index: int) -> None:
        if self.ctx.caller != self.parent:
            raise Revert("Unauthorized")
        self._set("instanceIndex", index)

    def op_complete(self, binding: ExternalBinding, args: list) -> None:
        expected = self._get("worklist" if binding.resource == "worklist" else "service",
                             NULL_ADDRESS)
        if self.ctx.caller != expected:
            raise Revert(f"Unauthorized: {binding.complete_function} accepts calls "
                         f"from the bound {binding.resource} only")
        tm, ts = self.words()
        bit = 1 << binding.node_index
        if ts & bit == 0:
            raise Revert(f"NotStarted: element {binding.node_index} is not awaiting completion")
        self._run_operations(binding, args)
        if binding.completion == "catcher":
            catcher = self.c.catchers[binding.catcher_id]
            tm, ts = self.apply_catch(catcher, tm, ts)
            if not catcher.interrupting:
                # repeatable trigger: push a fresh workitem, stay armed
                self.commit_words(tm, ts)
                self._start_external(binding.node_index)
                tm, ts = self.words()
        else:
            clear = binding.started_clear_mask
            tm |= binding.produce_mask
            ts &= ~clear
        self.step(tm, ts)

    def op_handle_event(self, kind: str, code: str, child_index: int) -> None:
        children = self.children()
        if child_index >= len(children) or children[child_index] != self.ctx.caller:
            raise Revert("UnknownChild")
        element = self._element_of_child(child_index)
        if element is None:
            raise Revert("UnknownChild: no started slot for caller")
        code = code or None
        if kind == EVENT_DEFAULT:
            self._child_completed(element, child_index)
        elif kind == "terminate":
            self._clear_child_slot(element, child_index)
            self._die(propagate=("terminate" if self.c.origin == "boundary" else EVENT_DEFAULT))
        elif kind in ("error", "escalation"):
            self._handle_upward(kind, code, element, child_index)
        elif kind == "signal":
            if self.parent != NULL_ADDRESS:
                self._propagate_up("signal", code)
            else:
                self._broadcast_local(code or "")
        else:
            raise Revert(f"unknown event kind {kind}")

    def op_broadcast_signal(self, code: str) -> None:
        if self.ctx.caller != self.parent:
            raise Revert("Unauthorized: broadcasts descend from the parent")
        self._broadcast_local(code)

    def _broadcast_local(self, code: str) -> None:
        code = code or None
        tm, ts = self.words()
        for catcher in self.c.catchers:
            if catcher.kind != "signal":
                continue
            if catcher.code is not None and code is not None and catcher.code != code:
                continue
            if self._catcher_enabled(catcher, tm, ts):
                tm, ts = self.apply_catch(catcher, tm, ts)
        self.step(tm, ts)
        for child in self.children():
            if child != NULL_ADDRESS:
                self.ctx.call_contract(child, "broadcast_signal", [code or ""],
                                       caller=self.address)
        self.finish_check()

    def op_terminate_from_parent(self) -> None:
        if self.ctx.caller != self.parent:
            raise Revert("Unauthorized: only the parent terminates an instance")
        tm, ts = self.words()
        tm, ts = self.kill_process(0, tm, ts)
        self.commit_words(tm, ts)
        self._set("closed", 1)

    # -- read-only ------------------------------------------------------------

    def op_read(self, operation: str, args: list):
        if operation == "marking":
            return self._get("marking", self.c.initial_marking)
        if operation == "startedActivities":
            return self._get("started")
        if operation == "parent":
            return self.parent
        if operation == "instanceIndex":
            return self._get("instanceIndex")
        if operation == "findWorklist":
            return self._get("worklist", NULL_ADDRESS)
        if operation == "findService":
            return self._get("service", NULL_ADDRESS)
        if operation == "begun":
            return self._get("begun")
        if operation == "findStartedInstances":
            element = int(args[0])
            mask = self.child_started(element)
            children = self.children()
            return [children[i] for i in range(len(children))
                    if mask & (1 << i) and children[i] != NULL_ADDRESS]
        if operation == "variable":
            env = self.load_env()
            return env.values[str(args[0])]
        if operation == "isFinished":
            tm, ts = self.words()
            return 1 if (self._get("begun") and tm == 0 and ts == 0) else 0
        raise Revert(f"unknown operation {operation}")

    # -- the step loop ---------------------------------------------------------

    def step(self, tm: int, ts: int) -> None:
        while True:
            fired = False
            for t in self.c.transitions:
                if t.guard_mask == 0 or (tm & t.guard_mask) != t.guard_mask:
                    continue
                if t.condition is not None:
                    if not eval_expr(t.condition, self.load_env()):
                        continue
                self.ctx.charge(self.ctx.schedule.transition_step)
                if t.action == "revertNoBranch":
                    raise Revert(f"NoBranchEnabled: exclusive gateway {t.label!r} "
                                 "has no enabled outgoing flow")
                tm = (tm & ~t.consume_mask) | t.produce_mask
                ts = (ts & ~t.started_clear_mask) | t.started_set_mask
                if t.action == "runScript":
                    if t.script:
                        self.store_env(exec_stmts(t.script, self.load_env()))
                elif t.action == "invokeExternalStart":
                    self.commit_words(tm, ts)
                    for index in t.arm_indexes:
                        self._start_external(index)
                    tm, ts = self.words()
                elif t.action == "instantiateChild":
                    self.commit_words(tm, ts)
                    self._instantiate(t.action_node)
                    for index in t.arm_indexes:
                        self._start_external(index)
                    tm, ts = self.words()
                elif t.action == "inlineStartScope":
                    self.commit_words(tm, ts)
                    for index in t.arm_indexes:
                        self._start_external(index)
                    tm, ts = self.words()
                elif t.action == "throwEvent":
                    self.commit_words(tm, ts)
                    self._throw(self.c.event_table[t.action_node])
                    tm, ts = self.words()
                fired = True
                break
            if not fired:
                break
        self.commit_words(tm, ts)
        self.finish_check()

    def finish_check(self) -> None:
        if not self._get("begun") or self._get("closed"):
            return
        tm, ts = self.words()
        if tm != 0 or ts & ~self.c.armed_mask != 0:
            return
        for r in self.c.reusable:
            if self.child_started(r):
                return
        if ts:
            self.commit_words(0, 0)
        self._set("closed", 1)
        parent = self.parent
        if parent != NULL_ADDRESS:
            self.ctx.call_contract(parent, "handle_event",
                                   [EVENT_DEFAULT, "", self._get("instanceIndex")],
                                   caller=self.address)

    # -- element execution -------------------------------------------------------

    def _run_operations(self, binding: ExternalBinding, args: list) -> None:
        imports = params_to_decls(binding.imports, self.decls.enums)
        if len(args) != len(imports):
            raise Revert(f"{binding.checkin_function} takes {len(imports)} inputs")
        values = {}
        for decl, raw in zip(imports, args):
            values[decl.name] = coerce_value(decl.type, raw, self.decls)
        env = self.load_env().child(self.decls.extended(imports), values)
        result = exec_stmts(binding.operations, env)
        narrowed = VarEnv(self.decls, {k: v for k, v in result.values.items()
                                       if k in self.decls.variables})
        self.store_env(narrowed)

    def _export_values(self, binding: ExternalBinding) -> list:
        env = self.load_env()
        return [env.values[name] for _, name in binding.exports]

    def _start_external(self, index: int) -> None:
        binding = self.c.external[index]
        slot = "worklist" if binding.resource == "worklist" else "service"
        resource = self._get(slot, NULL_ADDRESS)
        if resource == NULL_ADDRESS:
            raise Revert(f"MissingRegistryLink: no {binding.resource} bound for "
                         f"{binding.name!r}")
        self.ctx.call_contract(resource, binding.start_function,
                               self._export_values(binding), caller=self.address)

    def _instantiate(self, index: int) -> None:
        binding = self.c.reusable[index]
        count, reserved = 1, 0
        if binding.multi_instance is not None:
            n = eval_expr(binding.cardinality, self.load_env())
            if n == 0:
                raise Revert(f"cardinaliy of {binding.name!r} evaluated to zero")
            if binding.multi_instance == "parallel":
                count = n
            else:
                count, reserved = 1, n - 1
        created = [self._create_child(index) for _ in range(count)]
        for _ in range(reserved):
            self._push_child_slot(index, NULL_ADDRESS)
        for address in created:
            self.ctx.call_contract(address, "start_execution", [], caller=self.address)

    def _create_child(self, element_index: int) -> str:
        registry = self._get("registry", NULL_ADDRESS)
        if registry == NULL_ADDRESS:
            raise Revert("MissingRegistryLink: instance has no registry")
        address = self.ctx.call_contract(
            registry, "newInstanceFor", [element_index, self.address],
            caller=self.address)
        slot = self._push_child_slot(element_index, address)
        self.ctx.call_contract(address, "set_instance_index", [slot], caller=self.address)
        return address

    def _push_child_slot(self, element_index: int, address: str) -> int:
        slot = self._get("children.length")
        if slot >= 256:
            raise Revert("CapacityExceeded: more than 256 child instances")
        self._set("children.length", slot + 1)
        self._set(f"children.{slot}", address)
        self._set(f"childStarted:{element_index}",
                  self.child_started(element_index) | (1 << slot))
        return slot

    # -- kill ---------------------------------------------------------------------

    def kill_process(self, index: int, tm: int, ts: int) -> tuple[int, int]:
        entry = self.c.kill_table.get(index)
        if entry is None:
            raise Revert(f"not an interruptible element: {index}")
        tm &= ~entry.edges_clear
        ts &= ~entry.started_clear
        children = self.children()
        for r in entry.reusable_indexes:
            mask = self.child_started(r)
            if mask == 0:
                continue
            for i in range(len(children)):
                if mask & (1 << i) and children[i] != NULL_ADDRESS:
                    self.ctx.call_contract(children[i], "terminate_from_parent", [],
                                           caller=self.address)
            self._set(f"childStarted:{r}", 0)
        return tm, ts

    # -- event propagation ----------------------------------------------------------

    def _throw(self, plan) -> None:
        tm, ts = self.words()
        tm |= plan.produce_mask
        kind = plan.event_kind

        if kind == EVENT_DEFAULT:
            if plan.scope_index != 0:
                entry = self.c.scope_table[plan.scope_index]
                if self._scope_empty(entry, tm, ts):
                    tm |= entry.outgoing_mask
                    ts &= ~(entry.started_mask & self.c.armed_mask)
            self.commit_words(tm, ts)
            return

        if kind == "terminate":
            if plan.scope_index != 0:
                entry = self.c.scope_table[plan.scope_index]
                tm, ts = self.kill_process(plan.scope_index, tm, ts)
                tm |= entry.outgoing_mask
                self.commit_words(tm, ts)
                return
            tm, ts = self.kill_process(0, tm, ts)
            self.commit_words(tm, ts)
            self._die(propagate=("terminate" if self.c.origin == "boundary"
                                 else EVENT_DEFAULT))
            return

        if kind in ("error", "escalation"):
            if plan.local_catcher is not None:
                catcher = self.c.catchers[plan.local_catcher]
                tm, ts = self.apply_catch(catcher, tm, ts)
                self.commit_words(tm, ts)
                return
            self.commit_words(tm, ts)
            if kind == "error":
                self._die(propagate="error", code=plan.code)
            elif self.parent != NULL_ADDRESS:
                self._propagate_up("escalation", plan.code)
            if kind == "escalation" and plan.is_end:
                # an escalation end event also counts as a scope completion
                tm, ts = self.words()
                self._throw_default_completion(plan, tm, ts)
            return

        if kind == "signal":
            self.commit_words(tm, ts)
            if self.parent != NULL_ADDRESS:
                self._propagate_up("signal", plan.code)
            else:
                self._broadcast_local(plan.code or "")
            return

        if kind == "message":
            self.ctx.emit(self.address, "Message_Thrown",
                          [plan.node_index, plan.code or ""])
            self.commit_words(tm, ts)
            return

        raise Revert(f"unknown event kind {kind}")

    def _throw_default_completion(self, plan, tm: int, ts: int) -> None:
        if plan.scope_index != 0:
            entry = self.c.scope_table[plan.scope_index]
            if self._scope_empty(entry, tm, ts):
                tm |= entry.outgoing_mask
                ts &= ~(entry.started_mask & self.c.armed_mask)
        self.commit_words(tm, ts)

    def _scope_empty(self, entry, tm: int, ts: int) -> bool:
        if tm & entry.edges_mask or ts & entry.active_mask:
            return False
        return all(self.child_started(r) == 0 for r in entry.reusable_indexes)

    def _propagate_up(self, kind: str, code: Optional[str]) -> None:
        self.ctx.call_contract(self.parent, "handle_event",
                               [kind, code or "", self._get("instanceIndex")],
                               caller=self.address)

    def _die(self, propagate: Optional[str], code: Optional[str] = None) -> None:
        """Terminate this instance and optionally notify the parent once."""
        tm, ts = self.words()
        tm, ts = self.kill_process(0, tm, ts)
        self.commit_words(tm, ts)
        already_closed = self._get("closed")
        self._set("closed", 1)
        if propagate is not None and not already_closed and self.parent != NULL_ADDRESS:
            self._propagate_up(propagate, code)

    def _element_of_child(self, child_index: int) -> Optional[int]:
        for r in self.c.reusable:
            if self.child_started(r) & (1 << child_index):
                return r
        return None

    def _clear_child_slot(self, element: int, child_index: int) -> None:
        self._set(f"childStarted:{element}",
                  self.child_started(element) & ~(1 << child_index))

    def _child_completed(self, element: int, child_index: int) -> None:
        self._clear_child_slot(element, child_index)
        binding = self.c.reusable[element]
        if binding.multi_instance == "sequential":
            children = self.children()
            mask = self.child_started(element)
            for slot in range(len(children)):
                if mask & (1 << slot) and children[slot] == NULL_ADDRESS:
                    address = self._create_into_slot(element, slot)
                    self.ctx.call_contract(address, "start_execution", [],
                                           caller=self.address)
                    break
        if self.child_started(element) == 0:
            tm, ts = self.words()
            bit = 1 << element
            if not (bit & self.c.armed_mask):
                ts &= ~binding.started_clear_mask
            tm |= binding.produce_mask
            self.step(tm, ts)
        else:
            self.finish_check()

    def _create_into_slot(self, element_index: int, slot: int) -> str:
        registry = self._get("registry", NULL_ADDRESS)
        address = self.ctx.call_contract(
            registry, "newInstanceFor", [element_index, self.address],
            caller=self.address)
        self._set(f"children.{slot}", address)
        self.ctx.call_contract(address, "set_instance_index", [slot], caller=self.address)
        return address

    def _handle_upward(self, kind: str, code: Optional[str], element: int,
                       child_index: int) -> None:
        catcher = self._find_catcher_for_element(kind, code, element)
        if catcher is not None:
            if kind == "error":
                self._clear_child_slot(element, child_index)
            tm, ts = self.words()
            tm, ts = self.apply_catch(catcher, tm, ts)
            self.step(tm, ts)
            return
        if kind == "error":
            # the sender already terminated itself; this scope is torn down too
            self._clear_child_slot(element, child_index)
            if self.parent != NULL_ADDRESS:
                self._die(propagate="error", code=code)
            else:
                # uncaught at the root: involved subprocesses stop, the rest
                # of the execution stays unchanged
                if self.child_started(element) == 0:
                    tm, ts = self.words()
                    ts &= ~(1 << element)
                    self.commit_words(tm, ts)
                self.finish_check()
        else:  # escalation passes through without interrupting the relay
            if self.parent != NULL_ADDRESS:
                self._propagate_up("escalation", code)

    def _find_catcher_for_element(self, kind: str, code: Optional[str],
                                  element: int) -> Optional[Catcher]:
        def matches(c: Catcher) -> bool:
            return c.kind == kind and (c.code is None or code is None or c.code == code)

        for c in self.c.catchers:
            if c.attachment == "boundary" and c.guard_node == element and matches(c):
                return c
        # walk enclosing scopes of the element, inner to outer
        chain = []
        scope_index = self.c.scope_of.get(element, 0)
        while scope_index != 0:
            chain.append(scope_index)
            scope_index = self.c.scope_of.get(scope_index, 0)
        chain.append(0)
        for scope_index in chain:
            for c in self.c.catchers:
                if c.attachment == "event_subprocess" and c.guard_node == scope_index \
                        and matches(c):
                    return c
            if scope_index != 0:
                for c in self.c.catchers:
                    if c.attachment == "boundary" and c.guard_node == scope_index \
                            and matches(c):
                        return c
        return None

    def _catcher_enabled(self, catcher: Catcher, tm: int, ts: int) -> bool:
        if catcher.attachment == "intermediate":
            return tm & catcher.guard_edge_mask != 0
        if catcher.attachment == "event_gateway":
            return ts & catcher.guard_started_mask != 0
        if catcher.attachment == "boundary":
            host_bit = 1 << catcher.guard_node
            if host_bit & self.c.started_capable_mask:
                return ts & host_bit != 0
            entry = self.c.scope_table.get(catcher.guard_node)
            return entry is not None and not self._scope_empty(entry, tm, ts)
        if catcher.attachment == "event_subprocess":
            entry = self.c.scope_table.get(catcher.guard_node)
            return entry is not None and not self._scope_empty(entry, tm, ts)
        return False

    def apply_catch(self, catcher: Catcher, tm: int, ts: int) -> tuple[int, int]:
        if not catcher.interrupting:
            if catcher.spawn_node is not None:
                self.commit_words(tm, ts)
                created = self._create_child(catcher.spawn_node)
                ts |= 1 << catcher.spawn_node
                self.commit_words(tm, ts)
                self.ctx.call_contract(created, "start_execution", [],
                                       caller=self.address)
                tm, ts = self.words()
            return tm, ts
        if catcher.attachment == "intermediate":
            tm &= ~catcher.guard_edge_mask
        if catcher.kill_index is not None:
            tm, ts = self.kill_process(catcher.kill_index, tm, ts)
        tm |= catcher.produce_mask
        ts &= ~catcher.clear_mask
        return tm, ts
