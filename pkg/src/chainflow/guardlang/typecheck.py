"""Static typing for guard expressions and statements."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .ast import Assign, Binary, EnumMember, Expr, Lit, Require, Stmt, Unary, Var


@dataclass(frozen=True)
class Type:
    kind: str  # uint | bool | bytes32 | address | enum
    enum_name: Optional[str] = None

    def render(self) -> str:
        return self.enum_name if self.kind == "enum" else self.kind


UINT = Type("uint")
BOOL = Type("bool")
BYTES32 = Type("bytes32")
ADDRESS = Type("address")


def enum_type(name: str) -> Type:
    return Type("enum", name)


@dataclass(frozen=True)
class VariableDecl:
    name: str
    type: Type


@dataclass
class DeclEnv:
    """Typing environment: enum definitions plus variable/parameter types."""

    enums: dict[str, list[str]] = field(default_factory=dict)
    variables: dict[str, Type] = field(default_factory=dict)
    order: list[VariableDecl] = field(default_factory=list)

    def extended(self, params: list[VariableDecl]) -> "DeclEnv":
        merged = dict(self.variables)
        for p in params:
            merged[p.name] = p.type
        return DeclEnv(enums=self.enums, variables=merged,
                       order=self.order + [p for p in params if p.name not in self.variables])

    def member_ordinal(self, enum: str, member: str) -> int:
        return self.enums[enum].index(member)


class GuardTypeError(ValueError):
    def __init__(self, message: str, pos: int = 0):
        super().__init__(message)
        self.pos = pos


_ARITH = {"+", "-", "*", "/"}
_ORDER = {"<", "<=", ">", ">="}
_EQUALITY = {"==", "!="}
_LOGIC = {"&&", "||"}


def check_expr(e: Expr, env: DeclEnv) -> Type:
    """Infer the type of an expression, raising GuardTypeError on mismatch."""
    if isinstance(e, Lit):
        return Type(e.kind)
    if isinstance(e, Var):
        t = env.variables.get(e.name)
        if t is None:
            raise GuardTypeError(f"unknown name {e.name!r}", e.pos)
        return t
    if isinstance(e, EnumMember):
        members = env.enums.get(e.enum)
        if members is None:
            raise GuardTypeError(f"unknown enum {e.enum!r}", e.pos)
        if e.member not in members:
            raise GuardTypeError(f"enum {e.enum} has no member {e.member!r}", e.pos)
        return enum_type(e.enum)
    if isinstance(e, Unary):
        t = check_expr(e.operand, env)
        if e.op == "!":
            if t != BOOL:
                raise GuardTypeError(f"operator ! needs bool, got {t.render()}", e.pos)
            return BOOL
        if t != UINT:
            raise GuardTypeError(f"unary - needs uint, got {t.render()}", e.pos)
        return UINT
    if isinstance(e, Binary):
        lt = check_expr(e.left, env)
        rt = check_expr(e.right, env)
        if e.op in _ARITH:
            if lt != UINT or rt != UINT:
                raise GuardTypeError(
                    f"operator {e.op} needs uint operands, got {lt.render()} and {rt.render()}", e.pos)
            return UINT
        if e.op in _ORDER:
            if lt != UINT or rt != UINT:
                raise GuardTypeError(
                    f"operator {e.op} needs uint operands, got {lt.render()} and {rt.render()}", e.pos)
            return BOOL
        if e.op in _EQUALITY:
            if lt != rt:
                raise GuardTypeError(
                    f"cannot compare {lt.render()} with {rt.render()}", e.pos)
            return BOOL
        if e.op in _LOGIC:
            if lt != BOOL or rt != BOOL:
                raise GuardTypeError(
                    f"operator {e.op} needs bool operands, got {lt.render()} and {rt.render()}", e.pos)
            return BOOL
    raise GuardTypeError(f"unsupported expression {e!r}")


def check_stmt(s: Stmt, env: DeclEnv) -> None:
    if isinstance(s, Assign):
        target = env.variables.get(s.target)
        if target is None:
            raise GuardTypeError(f"assignment to undeclared name {s.target!r}", s.pos)
        value = check_expr(s.value, env)
        if value != target:
            raise GuardTypeError(
                f"cannot assign {value.render()} to {s.target} of type {target.render()}", s.pos)
        return
    if isinstance(s, Require):
        cond = check_expr(s.condition, env)
        if cond != BOOL:
            raise GuardTypeError(f"require needs a bool condition, got {cond.render()}", s.pos)
        return
    raise GuardTypeError(f"unsupported statement {s!r}")


def check_stmts(stmts: list[Stmt], env: DeclEnv) -> None:
    for s in stmts:
        check_stmt(s, env)


def check(node: Union[Expr, Stmt, list], env: DeclEnv):
    """Convenience entry point: expression -> its type, statements -> None."""
    if isinstance(node, list):
        return check_stmts(node, env)
    if isinstance(node, (Assign, Require)):
        return check_stmt(node, env)
    return check_expr(node, env)
