"""AST node definitions and the source printer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

# Word size of the simulated contract machine.
WORD_BITS = 256
WORD_MODULUS = 1 << WORD_BITS


@dataclass(frozen=True)
class Lit:
    value: Union[int, str]
    kind: str  # uint | bool | bytes32
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class EnumMember:
    enum: str
    member: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # ! or -
    operand: "Expr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str  # == != < <= > >= + - * / && ||
    left: "Expr"
    right: "Expr"
    pos: int = field(default=0, compare=False)


Expr = Union[Lit, Var, EnumMember, Unary, Binary]


@dataclass(frozen=True)
class Assign:
    target: str
    value: Expr
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Require:
    condition: Expr
    pos: int = field(default=0, compare=False)


Stmt = Union[Assign, Require]

_PRECEDENCE = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6,
}


def to_source(node: Union[Expr, Stmt]) -> str:
    """Render a node back to concrete syntax. parse(to_source(x)) == x."""
    if isinstance(node, Assign):
        return f"{node.target} = {to_source(node.value)};"
    if isinstance(node, Require):
        return f"require({to_source(node.condition)});"
    return _expr_source(node, 0)


def _expr_source(e: Expr, parent_prec: int) -> str:
    if isinstance(e, Lit):
        if e.kind == "bool":
            return "true" if e.value else "false"
        if e.kind == "bytes32":
            return str(e.value)
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, EnumMember):
        return f"{e.enum}.{e.member}"
    if isinstance(e, Unary):
        return f"{e.op}{_expr_source(e.operand, 7)}"
    prec = _PRECEDENCE[e.op]
    text = f"{_expr_source(e.left, prec)} {e.op} {_expr_source(e.right, prec + 1)}"
    if prec < parent_prec:
        return f"({text})"
    return text
