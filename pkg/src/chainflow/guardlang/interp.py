"""Evaluation of well-typed guard expressions and statements.

Values are represented as plain Python data: uint/bool/enum as non-negative
ints (bools 0/1, enums as member ordinals), bytes32 and address as 0x-prefixed
lowercase hex strings. uint arithmetic wraps modulo 2**256.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .ast import (
    Assign, Binary, EnumMember, Expr, Lit, Require, Stmt, Unary, Var,
    WORD_MODULUS, to_source,
)
from .typecheck import DeclEnv, Type

Value = Union[int, str]


class Revert(Exception):
    """A failed precondition; the enclosing transaction must discard all writes."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class DivisionByZero(Revert):
    def __init__(self):
        super().__init__("division by zero")


@dataclass
class VarEnv:
    """Variable values over a declaration environment."""

    decls: DeclEnv
    values: dict[str, Value] = field(default_factory=dict)

    @classmethod
    def initial(cls, decls: DeclEnv) -> "VarEnv":
        return cls(decls, {d.name: zero_value(d.type) for d in decls.order})

    def child(self, extra_decls: DeclEnv, extra_values: dict[str, Value]) -> "VarEnv":
        merged = dict(self.values)
        merged.update(extra_values)
        return VarEnv(extra_decls, merged)


def zero_value(t: Type) -> Value:
    if t.kind == "bytes32":
        return "0x" + "00" * 32
    if t.kind == "address":
        return "0x" + "00" * 20
    return 0


def eval_expr(e: Expr, env: VarEnv) -> Value:
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Var):
        return env.values[e.name]
    if isinstance(e, EnumMember):
        return env.decls.member_ordinal(e.enum, e.member)
    if isinstance(e, Unary):
        v = eval_expr(e.operand, env)
        if e.op == "!":
            return 0 if v else 1
        return (-v) % WORD_MODULUS
    if isinstance(e, Binary):
        if e.op == "&&":
            return 1 if (eval_expr(e.left, env) and eval_expr(e.right, env)) else 0
        if e.op == "||":
            return 1 if (eval_expr(e.left, env) or eval_expr(e.right, env)) else 0
        lv = eval_expr(e.left, env)
        rv = eval_expr(e.right, env)
        if e.op == "+":
            return (lv + rv) % WORD_MODULUS
        if e.op == "-":
            return (lv - rv) % WORD_MODULUS
        if e.op == "*":
            return (lv * rv) % WORD_MODULUS
        if e.op == "/":
            if rv == 0:
                raise DivisionByZero()
            return lv // rv
        if e.op == "==":
            return 1 if lv == rv else 0
        if e.op == "!=":
            return 1 if lv != rv else 0
        if e.op == "<":
            return 1 if lv < rv else 0
        if e.op == "<=":
            return 1 if lv <= rv else 0
        if e.op == ">":
            return 1 if lv > rv else 0
        if e.op == ">=":
            return 1 if lv >= rv else 0
    raise ValueError(f"cannot evaluate {e!r}")


def exec_stmts(stmts: list[Stmt], env: VarEnv) -> VarEnv:
    """Run statements, returning a fresh environment. Raises Revert when a
    require fails; the input environment is never mutated."""
    values = dict(env.values)
    scratch = VarEnv(env.decls, values)
    for s in stmts:
        if isinstance(s, Require):
            if not eval_expr(s.condition, scratch):
                raise Revert(f"require failed: {to_source(s.condition)}")
        elif isinstance(s, Assign):
            values[s.target] = eval_expr(s.value, scratch)
        else:
            raise ValueError(f"cannot execute {s!r}")
    return scratch


def coerce_value(t: Type, raw, decls: DeclEnv) -> Value:
    """Convert externally supplied input (e.g. JSON or CLI text) into the
    internal representation for a declared type."""
    if t.kind == "uint":
        try:
            v = int(raw)
        except (TypeError, ValueError):
            raise Revert(f"not a uint: {raw!r}") from None
        if v < 0 or v >= WORD_MODULUS:
            raise Revert(f"uint out of range: {raw}")
        return v
    if t.kind == "bool":
        if isinstance(raw, bool):
            return 1 if raw else 0
        if isinstance(raw, int):
            return 1 if raw else 0
        if isinstance(raw, str) and raw.lower() in ("true", "false"):
            return 1 if raw.lower() == "true" else 0
        raise Revert(f"not a bool: {raw!r}")
    if t.kind == "enum":
        members = decls.enums.get(t.enum_name or "", [])
        if isinstance(raw, int) and 0 <= raw < len(members):
            return raw
        if isinstance(raw, str):
            name = raw.split(".")[-1]
            if name in members:
                return members.index(name)
            if name.isdigit() and int(name) < len(members):
                return int(name)
        raise Revert(f"not a member of {t.enum_name}: {raw!r}")
    if t.kind in ("bytes32", "address"):
        width = 32 if t.kind == "bytes32" else 20
        if isinstance(raw, str):
            if raw.startswith("0x"):
                digits = raw[2:].lower()
                if len(digits) <= 2 * width and all(c in "0123456789abcdef" for c in digits):
                    return "0x" + digits.rjust(2 * width, "0")
            else:
                data = raw.encode("utf-8")
                if len(data) <= width:
                    return "0x" + data.ljust(width, b"\0").hex()
        raise Revert(f"not a {t.kind}: {raw!r}")
    raise Revert(f"unsupported type {t.render()}")


def render_value(t: Type, v: Value, decls: DeclEnv) -> str:
    """Human-facing rendering used in state views and reports."""
    if t.kind == "bool":
        return "true" if v else "false"
    if t.kind == "enum":
        members = decls.enums.get(t.enum_name or "", [])
        if isinstance(v, int) and 0 <= v < len(members):
            return members[v]
        return str(v)
    return str(v)
