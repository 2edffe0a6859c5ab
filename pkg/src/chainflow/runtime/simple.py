"""The non-workflow contracts: worklist/service bridge, factory, runtime
registry, flat baseline contracts and the basic event recorder."""

from __future__ import annotations

from ..guardlang import Revert, VarEnv, coerce_value, eval_expr, exec_stmts
from ..ledger.core import NULL_ADDRESS, TxContext
from .process import params_to_decls

PROCESS_TYPE = "PROCESS-CONTRACT"
WORKLIST_TYPE = "WORKLIST-CONTRACT"
SERVICE_TYPE = "SERVICE-CONTRACT"
FACTORY_TYPE = "FACTORY-CONTRACT"

_RESOURCE_TYPES = {"worklist": WORKLIST_TYPE, "service": SERVICE_TYPE}


# -- worklist / service bridge --------------------------------------------------

WORKLIST_READ_ONLY = {"workitemCount", "workitem", "workitemsFor", "elementIndexFor",
                      "scopeHash"}


def worklist_execute(image: dict, ctx: TxContext, address: str, operation: str, args: list):
    by_start = {b["start"]: b for b in image["bindings"]}
    by_checkin = {b["checkin"]: b for b in image["bindings"]}

    def count() -> int:
        return ctx.sget(address, "workitems.length")

    if operation == "workitemCount":
        return count()
    if operation == "workitem":
        i = int(args[0])
        if i >= count():
            raise Revert(f"BadWorkitemId: {i}")
        return {"instanceAddress": ctx.sget(address, f"wi:{i}:instance", NULL_ADDRESS),
                "elementIndex": ctx.sget(address, f"wi:{i}:element")}
    if operation == "workitemsFor":
        element, instance = int(args[0]), args[1]
        out = []
        for i in range(count()):
            if ctx.sget(address, f"wi:{i}:element") == element \
                    and ctx.sget(address, f"wi:{i}:instance", NULL_ADDRESS) == instance:
                out.append(i)
        return out
    if operation == "elementIndexFor":
        i = int(args[0])
        if i >= count():
            raise Revert(f"BadWorkitemId: {i}")
        return ctx.sget(address, f"wi:{i}:element")
    if operation == "scopeHash":
        return image["scope_hash"]

    if operation in by_start:
        binding = by_start[operation]
        i = count()
        ctx.sset(address, "workitems.length", i + 1)
        ctx.sset(address, f"wi:{i}:instance", ctx.caller)
        ctx.sset(address, f"wi:{i}:element", binding["node_index"])
        ctx.emit(address, f"{binding['checkin']}_Requested", [i] + list(args))
        return i

    if operation in by_checkin:
        binding = by_checkin[operation]
        if not args:
            raise Revert("check-in needs a workitem id")
        i = int(args[0])
        inputs = list(args[1:])
        if i >= count():
            raise Revert(f"BadWorkitemId: {i}")
        if ctx.sget(address, f"wi:{i}:element") != binding["node_index"]:
            raise Revert(f"WrongElement: workitem {i} is not a "
                         f"{binding['checkin']} item")
        instance = ctx.sget(address, f"wi:{i}:instance", NULL_ADDRESS)
        if instance == NULL_ADDRESS:
            raise Revert(f"AlreadyCompleted: workitem {i}")
        ctx.call_contract(instance, binding["complete"], inputs, caller=address)
        ctx.sset(address, f"wi:{i}:instance", NULL_ADDRESS)
        ctx.emit(address, "Workitem_Completed", [i, binding["node_index"]])
        return None

    raise Revert(f"unknown {image['resource']} operation {operation!r}")


# -- factory ---------------------------------------------------------------------

def factory_execute(image: dict, ctx: TxContext, address: str, operation: str, args: list):
    if operation != "create":
        raise Revert(f"unknown factory operation {operation!r}")
    registry, parent = args
    instance = ctx.deploy_contract(address, image["ir_bytes"])
    ctx.sset(instance, "registry", registry)
    if parent != NULL_ADDRESS:
        ctx.sset(instance, "parent", parent)
    scope_hash = image["scope_hash"]
    worklist = ctx.call_contract(registry, "findResource", [scope_hash, "worklist"],
                                 caller=address)
    if worklist != NULL_ADDRESS:
        ctx.sset(instance, "worklist", worklist)
    service = ctx.call_contract(registry, "findResource", [scope_hash, "service"],
                                caller=address)
    if service != NULL_ADDRESS:
        ctx.sset(instance, "service", service)
    return instance


# -- runtime registry --------------------------------------------------------------

REGISTRY_READ_ONLY = {"findHashFor", "findFactory", "findResource", "findRelation",
                      "instancesOf"}


def registry_execute(ctx: TxContext, address: str, operation: str, args: list):
    def instances_key(h: str) -> str:
        return f"instances:{h}"

    if operation == "registerFactory":
        process_hash, factory = args
        ctx.sset(address, f"factory:{process_hash}", factory)
        ctx.sset(address, f"hash:{factory}:{FACTORY_TYPE}", process_hash)
        return None
    if operation == "registerResource":
        process_hash, kind, resource = args
        if kind not in _RESOURCE_TYPES:
            raise Revert(f"unknown resource kind {kind!r}")
        ctx.sset(address, f"resource:{process_hash}:{kind}", resource)
        ctx.sset(address, f"hash:{resource}:{_RESOURCE_TYPES[kind]}", process_hash)
        return None
    if operation == "relateProcess":
        parent_hash, element_index, child_hash = args
        ctx.sset(address, f"child:{parent_hash}:{element_index}", child_hash)
        return None
    if operation == "findHashFor":
        target, contract_type = args
        value = ctx.sget(address, f"hash:{target}:{contract_type}", "")
        if not value:
            raise Revert(f"no {contract_type} hash for {target}")
        return value
    if operation == "findFactory":
        return ctx.sget(address, f"factory:{args[0]}", NULL_ADDRESS)
    if operation == "findResource":
        process_hash, kind = args
        return ctx.sget(address, f"resource:{process_hash}:{kind}", NULL_ADDRESS)
    if operation == "findRelation":
        parent_hash, element_index = args
        return ctx.sget(address, f"child:{parent_hash}:{element_index}", "")
    if operation == "instancesOf":
        h = args[0]
        n = ctx.sget(address, f"{instances_key(h)}.length")
        return [ctx.sget(address, f"{instances_key(h)}.{i}") for i in range(n)]
    if operation == "newInstanceFor":
        if len(args) == 1 or args[1] in (None, NULL_ADDRESS):
            process_hash = args[0]
            parent = NULL_ADDRESS
        else:
            element_index, parent = int(args[0]), args[1]
            if ctx.caller != parent or not ctx.has_account(parent):
                raise Revert("ChildInstantiationByExternal: only a parent process "
                             "instantiates its children")
            parent_hash = ctx.sget(address, f"hash:{parent}:{PROCESS_TYPE}", "")
            if not parent_hash:
                raise Revert(f"no registered process at {parent}")
            process_hash = ctx.sget(address, f"child:{parent_hash}:{element_index}", "")
            if not process_hash:
                raise Revert(f"NoRelation: {parent_hash} element {element_index}")
        factory = ctx.sget(address, f"factory:{process_hash}", NULL_ADDRESS)
        if factory == NULL_ADDRESS:
            raise Revert(f"NoFactory: {process_hash}")
        instance = ctx.call_contract(factory, "create", [address, parent],
                                     caller=address)
        ctx.sset(address, f"hash:{instance}:{PROCESS_TYPE}", process_hash)
        n = ctx.sget(address, f"{instances_key(process_hash)}.length")
        ctx.sset(address, f"{instances_key(process_hash)}.length", n + 1)
        ctx.sset(address, f"{instances_key(process_hash)}.{n}", instance)
        ctx.emit(address, "Instance_Created", [instance, process_hash, parent])
        return instance
    raise Revert(f"unknown registry operation {operation!r}")


# -- flat baseline contracts ---------------------------------------------------------

FLAT_READ_ONLY = {"marking", "variable", "isFinished"}


class FlatVm:
    def __init__(self, runtime, ctx: TxContext, address: str, contract):
        self.runtime = runtime
        self.ctx = ctx
        self.address = address
        self.c = contract
        self.decls = runtime.decls_for(contract)

    def load_env(self) -> VarEnv:
        env = VarEnv.initial(self.decls)
        for d in self.decls.order:
            value = self.ctx.sget(self.address, f"var:{d.name}", None)
            if value is not None:
                env.values[d.name] = value
        return env

    def store_env(self, env: VarEnv) -> None:
        initial = VarEnv.initial(self.decls)
        for d in self.decls.order:
            current = self.ctx.sget(self.address, f"var:{d.name}", None)
            new = env.values[d.name]
            if current != new and not (current is None and new == initial.values[d.name]):
                self.ctx.sset(self.address, f"var:{d.name}", new)

    def read(self, operation: str, args: list):
        if operation == "marking":
            return self.ctx.sget(self.address, "marking", self.c.initial_marking)
        if operation == "variable":
            return self.load_env().values[str(args[0])]
        if operation == "isFinished":
            return 1 if self.ctx.sget(self.address, "marking", self.c.initial_marking) == 0 else 0
        raise Revert(f"unknown operation {operation}")

    def deploy(self) -> None:
        self.ctx.sset(self.address, "marking", self.c.initial_marking)
        self.step(self.c.initial_marking)

    def task(self, op, args: list) -> None:
        tm = self.ctx.sget(self.address, "marking", self.c.initial_marking)
        enabled = tm & op.guard_mask
        if enabled == 0:
            raise Revert(f"NotEnabled: {op.element_name!r} has no token")
        consume = enabled & -enabled  # lowest enabled incoming bit
        tm &= ~consume
        imports = params_to_decls(op.imports, self.decls.enums)
        if len(args) != len(imports):
            raise Revert(f"{op.name} takes {len(imports)} inputs")
        values = {d.name: coerce_value(d.type, raw, self.decls)
                  for d, raw in zip(imports, args)}
        env = self.load_env().child(self.decls.extended(imports), values)
        result = exec_stmts(op.operations, env)
        self.store_env(VarEnv(self.decls, {k: v for k, v in result.values.items()
                                           if k in self.decls.variables}))
        tm |= self._select_variant(op.variants, op.name)
        self.step(tm)

    def _select_variant(self, variants, label: str) -> int:
        env = None
        for condition, mask in variants:
            if condition is None:
                return mask
            env = env or self.load_env()
            if eval_expr(condition, env):
                return mask
        raise Revert(f"NoBranchEnabled: no variant of {label!r} applies")

    def step(self, tm: int) -> None:
        while True:
            fired = False
            for t in self.c.transitions:
                if t.guard_mask == 0 or (tm & t.guard_mask) != t.guard_mask:
                    continue
                self.ctx.charge(self.ctx.schedule.transition_step)
                tm &= ~t.consume_mask
                if t.script:
                    self.store_env(exec_stmts(t.script, self.load_env()))
                tm |= self._select_variant(t.variants, t.label)
                fired = True
                break
            if not fired:
                break
        if self.ctx.sget(self.address, "marking", None) != tm:
            self.ctx.sset(self.address, "marking", tm)


def flat_execute(runtime, contract, ctx: TxContext, address: str, operation: str,
                 args: list):
    vm = FlatVm(runtime, ctx, address, contract)
    if operation in FLAT_READ_ONLY:
        return vm.read(operation, args)
    op = contract.ops.get(operation)
    if op is None:
        raise Revert(f"unknown task operation {operation!r}")
    vm.task(op, args)
    return None


# -- basic recorder --------------------------------------------------------------------

RECORDER_READ_ONLY = {"recordedCount", "recorded"}


def recorder_execute(ctx: TxContext, address: str, operation: str, args: list):
    if operation == "record":
        n = ctx.sget(address, "events.length")
        ctx.sset(address, "events.length", n + 1)
        ctx.sset(address, f"events.{n}", str(args[0]))
        return n
    if operation == "recordedCount":
        return ctx.sget(address, "events.length")
    if operation == "recorded":
        return ctx.sget(address, f"events.{int(args[0])}", "")
    raise Revert(f"unknown recorder operation {operation!r}")
