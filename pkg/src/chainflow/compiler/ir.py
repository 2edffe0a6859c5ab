"""Contract intermediate representation and its canonical serialization.

The canonical JSON form (sorted keys, no whitespace) is both the deployable
image and the input to content hashing, so identical models always produce
identical contract hashes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional, Union

from ..guardlang import Expr, Stmt, parse_expr, parse_stmts, to_source

Param = tuple[str, str]  # (type rendering, name)


@dataclass
class Transition:
    source_index: int
    label: str
    guard_mask: int
    consume_mask: int
    produce_mask: int = 0
    started_set_mask: int = 0
    started_clear_mask: int = 0
    condition: Optional[Expr] = None
    action: str = "none"   # none | runScript | invokeExternalStart | instantiateChild
    #                      # | throwEvent | inlineStartScope | revertNoBranch
    action_node: int = 0   # element index the action applies to
    script: list[Stmt] = field(default_factory=list)
    arm_indexes: list[int] = field(default_factory=list)  # armed message catchers


@dataclass
class ExternalBinding:
    node_index: int
    element_id: str
    name: str
    resource: str            # worklist | service
    start_function: str
    checkin_function: str
    complete_function: str
    exports: list[Param] = field(default_factory=list)
    imports: list[Param] = field(default_factory=list)
    operations: list[Stmt] = field(default_factory=list)
    produce_mask: int = 0
    started_clear_mask: int = 0
    completion: str = "normal"   # normal | catcher
    catcher_id: Optional[int] = None
    armed_by: Optional[int] = None  # host activity index, or 0 when armed at start


@dataclass
class ReusableBinding:
    node_index: int
    element_id: str
    name: str
    child_scope_id: str
    child_hash: Optional[str] = None
    multi_instance: Optional[str] = None  # parallel | sequential
    cardinality: Optional[Expr] = None
    produce_mask: int = 0
    started_clear_mask: int = 0


@dataclass
class PropagationPlan:
    node_index: int
    event_kind: str   # none | terminate | error | escalation | signal | message
    code: Optional[str]
    pattern: str      # Upward | SingleUpward | Broadcast | Outside
    scope_index: int  # enclosing internal scope's node index, 0 at contract root
    produce_mask: int = 0   # outgoing (intermediate throws continue locally)
    is_end: bool = True
    local_catcher: Optional[int] = None


@dataclass
class Catcher:
    id: int
    node_index: int
    element_id: str
    name: str
    kind: str                 # message | signal | error | escalation
    code: Optional[str]
    interrupting: bool
    attachment: str           # boundary | event_subprocess | intermediate | event_gateway
    guard_node: int = 0       # host activity / enclosing scope index (0 = contract root)
    guard_edge_mask: int = 0  # intermediate catch: waiting-token bits
    guard_started_mask: int = 0  # armed / event-gateway member bits
    kill_index: Optional[int] = None
    produce_mask: int = 0
    clear_mask: int = 0
    spawn_node: Optional[int] = None


@dataclass
class ScopeEntry:
    index: int                 # 0 for the contract root, else the scope node's index
    edges_mask: int = 0
    started_mask: int = 0      # every started-capable bit in the subtree
    active_mask: int = 0       # started_mask minus armed catcher bits
    outgoing_mask: int = 0
    initial_mask: int = 0      # start event's outgoing edges within the scope
    reusable_indexes: list[int] = field(default_factory=list)


@dataclass
class KillEntry:
    index: int
    edges_clear: int = 0
    started_clear: int = 0
    reusable_indexes: list[int] = field(default_factory=list)


@dataclass
class CompiledContract:
    scope_id: str
    name: str
    origin: str
    variables: list[Param] = field(default_factory=list)
    enums: dict[str, list[str]] = field(default_factory=dict)
    word_bits: int = 0
    node_count: int = 0
    initial_marking: int = 0
    full_edges_mask: int = 0
    started_capable_mask: int = 0
    armed_mask: int = 0
    start_arm_indexes: list[int] = field(default_factory=list)
    transitions: list[Transition] = field(default_factory=list)
    external: dict[int, ExternalBinding] = field(default_factory=dict)
    reusable: dict[int, ReusableBinding] = field(default_factory=dict)
    event_table: dict[int, PropagationPlan] = field(default_factory=dict)
    catchers: list[Catcher] = field(default_factory=list)
    scope_table: dict[int, ScopeEntry] = field(default_factory=dict)
    kill_table: dict[int, KillEntry] = field(default_factory=dict)
    scope_of: dict[int, int] = field(default_factory=dict)  # node -> enclosing scope index

    kind = "process"


@dataclass
class FlatTransition:
    source_index: int
    label: str
    guard_mask: int
    consume_mask: int
    variants: list[tuple[Optional[Expr], int]] = field(default_factory=list)
    script: list[Stmt] = field(default_factory=list)


@dataclass
class FlatOp:
    name: str
    node_index: int
    element_id: str
    element_name: str
    guard_mask: int            # any single incoming bit enables the task
    imports: list[Param] = field(default_factory=list)
    operations: list[Stmt] = field(default_factory=list)
    variants: list[tuple[Optional[Expr], int]] = field(default_factory=list)


@dataclass
class FlatContract:
    scope_id: str
    name: str
    mode: str                  # default | optimized
    variables: list[Param] = field(default_factory=list)
    enums: dict[str, list[str]] = field(default_factory=dict)
    word_bits: int = 0
    initial_marking: int = 0
    transitions: list[FlatTransition] = field(default_factory=list)
    ops: dict[str, FlatOp] = field(default_factory=dict)

    kind = "flat"


@dataclass
class RecorderContract:
    scope_id: str
    name: str

    kind = "recorder"


AnyContract = Union[CompiledContract, FlatContract, RecorderContract]


@dataclass
class DictionaryElement:
    index: int
    element_id: str
    name: str
    element_type: str  # WORKITEM | SERVICE | SEPARATE_INSTANCE | INTERNAL
    functions: dict[str, str] = field(default_factory=dict)
    exports: list[Param] = field(default_factory=list)
    imports: list[Param] = field(default_factory=list)


@dataclass
class DictionaryContract:
    scope_id: str
    name: str
    hash: str
    parent_hash: Optional[str]
    parent_element_index: Optional[int]
    elements: dict[int, DictionaryElement] = field(default_factory=dict)
    enums: dict[str, list[str]] = field(default_factory=dict)


@dataclass
class CompilationDictionary:
    model_name: str
    mode: str
    contracts: list[DictionaryContract] = field(default_factory=list)

    def contract_by_hash(self, h: str) -> Optional[DictionaryContract]:
        for c in self.contracts:
            if c.hash == h:
                return c
        return None

    def root(self) -> DictionaryContract:
        return self.contracts[0]

    def to_json(self) -> str:
        return json.dumps(_plain(self), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "CompilationDictionary":
        raw = json.loads(text)
        d = cls(model_name=raw["model_name"], mode=raw["mode"])
        for c in raw["contracts"]:
            dc = DictionaryContract(
                scope_id=c["scope_id"], name=c["name"], hash=c["hash"],
                parent_hash=c["parent_hash"],
                parent_element_index=c["parent_element_index"],
                enums=c.get("enums", {}))
            for k, e in c["elements"].items():
                dc.elements[int(k)] = DictionaryElement(
                    index=e["index"], element_id=e["element_id"], name=e["name"],
                    element_type=e["element_type"], functions=e["functions"],
                    exports=[tuple(p) for p in e["exports"]],
                    imports=[tuple(p) for p in e["imports"]])
            d.contracts.append(dc)
        return d


# -- canonical serialization -------------------------------------------------

def _plain(obj):
    """Recursively convert IR dataclasses to JSON-encodable primitives.
    Expressions and statements are rendered to canonical source text."""
    from dataclasses import fields, is_dataclass
    from ..guardlang.ast import Assign, Binary, EnumMember, Lit, Require, Unary, Var

    if isinstance(obj, (Lit, Var, EnumMember, Unary, Binary)):
        return {"expr": to_source(obj)}
    if isinstance(obj, (Assign, Require)):
        return {"stmt": to_source(obj)}
    if is_dataclass(obj):
        out = {"_kind": type(obj).__name__}
        for f in fields(obj):
            out[f.name] = _plain(getattr(obj, f.name))
        return out
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


_IR_CLASSES = None


def _ir_classes():
    global _IR_CLASSES
    if _IR_CLASSES is None:
        _IR_CLASSES = {c.__name__: c for c in (
            Transition, ExternalBinding, ReusableBinding, PropagationPlan,
            Catcher, ScopeEntry, KillEntry, CompiledContract, FlatTransition,
            FlatOp, FlatContract, RecorderContract)}
    return _IR_CLASSES


_INT_KEY_FIELDS = {"external", "reusable", "event_table", "scope_table", "kill_table",
                   "scope_of"}


def _revive(obj, field_name: str = ""):
    if isinstance(obj, dict):
        if set(obj) == {"expr"}:
            return parse_expr(obj["expr"])
        if set(obj) == {"stmt"}:
            return parse_stmts(obj["stmt"])[0]
        if "_kind" in obj:
            cls = _ir_classes()[obj["_kind"]]
            kwargs = {k: _revive(v, k) for k, v in obj.items() if k != "_kind"}
            return cls(**kwargs)
        keys = (int(k) if field_name in _INT_KEY_FIELDS else k for k in obj)
        return {k: _revive(v, field_name) for k, v in zip(keys, obj.values())}
    if isinstance(obj, list):
        revived = [_revive(v, field_name) for v in obj]
        if field_name in ("variants", "exports", "imports", "variables") and revived \
                and all(isinstance(v, list) and len(v) == 2 for v in obj):
            return [tuple(v) for v in revived]
        return revived
    return obj


def serialize_contract(contract: AnyContract) -> bytes:
    payload = {"format": "chainflow-ir-1", "contract": _plain(contract)}
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def deserialize_contract(data: bytes) -> AnyContract:
    payload = json.loads(data.decode("utf-8"))
    if payload.get("format") != "chainflow-ir-1":
        raise ValueError("not a contract image")
    return _revive(payload["contract"])


def contract_hash(contract: AnyContract) -> str:
    return hashlib.sha256(serialize_contract(contract)).hexdigest()
