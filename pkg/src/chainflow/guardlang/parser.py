"""Tokenizer and recursive-descent parser for guard expressions, statements
and variable declaration blocks."""

from __future__ import annotations

import re
from typing import Optional

from .ast import Assign, Binary, EnumMember, Expr, Lit, Require, Stmt, Unary, Var
from .typecheck import DeclEnv, Type, VariableDecl, enum_type


class GuardSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<hex>0x[0-9a-fA-F]+)
  | (?P<number>\d+)
  | (?P<string>"[^"\n]*")
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\|\||&&|==|!=|<=|>=|->|[-+*/!<>=(){};:,.])
    """,
    re.VERBOSE,
)

KEYWORDS = {"true", "false", "require", "enum", "uint", "bool", "bytes32", "address"}


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise GuardSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


def _bytes32_from_string(raw: str, pos: int) -> str:
    data = raw[1:-1].encode("utf-8")
    if len(data) > 32:
        raise GuardSyntaxError("string literal longer than 32 bytes", pos)
    return "0x" + data.ljust(32, b"\0").hex()


def _bytes32_from_hex(raw: str, pos: int) -> str:
    digits = raw[2:]
    if len(digits) > 64:
        raise GuardSyntaxError("hex literal longer than 32 bytes", pos)
    return "0x" + digits.lower().rjust(64, "0")


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> tuple[str, str, int]:
        tok = self.next()
        if tok[1] != text:
            raise GuardSyntaxError(f"expected {text!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def at(self, text: str) -> bool:
        return self.peek()[1] == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    # -- expressions ------------------------------------------------------

    def expression(self) -> Expr:
        return self._binary(1)

    _LEVELS = [
        {"||"},
        {"&&"},
        {"==", "!="},
        {"<", "<=", ">", ">="},
        {"+", "-"},
        {"*", "/"},
    ]

    def _binary(self, level: int) -> Expr:
        if level > len(self._LEVELS):
            return self._unary()
        ops = self._LEVELS[level - 1]
        left = self._binary(level + 1)
        while self.peek()[1] in ops:
            _, op, pos = self.next()
            right = self._binary(level + 1)
            left = Binary(op, left, right, pos=pos)
        return left

    def _unary(self) -> Expr:
        kind, text, pos = self.peek()
        if text in ("!", "-"):
            self.next()
            return Unary(text, self._unary(), pos=pos)
        return self._primary()

    def _primary(self) -> Expr:
        kind, text, pos = self.next()
        if text == "(":
            inner = self.expression()
            self.expect(")")
            return inner
        if kind == "number":
            return Lit(int(text), "uint", pos=pos)
        if kind == "hex":
            if len(text) - 2 > 16:
                return Lit(_bytes32_from_hex(text, pos), "bytes32", pos=pos)
            return Lit(int(text, 16), "uint", pos=pos)
        if kind == "string":
            return Lit(_bytes32_from_string(text, pos), "bytes32", pos=pos)
        if kind == "name":
            if text == "true":
                return Lit(1, "bool", pos=pos)
            if text == "false":
                return Lit(0, "bool", pos=pos)
            if self.at("."):
                self.next()
                mkind, member, mpos = self.next()
                if mkind != "name":
                    raise GuardSyntaxError("expected enum member name", mpos)
                return EnumMember(text, member, pos=pos)
            return Var(text, pos=pos)
        raise GuardSyntaxError(f"unexpected token {text or 'end of input'!r}", pos)

    # -- statements -------------------------------------------------------

    def statement(self) -> Stmt:
        kind, text, pos = self.peek()
        if text == "require":
            self.next()
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            self.expect(";")
            return Require(cond, pos=pos)
        if kind != "name" or text in KEYWORDS:
            raise GuardSyntaxError(f"expected statement, found {text!r}", pos)
        self.next()
        self.expect("=")
        value = self.expression()
        self.expect(";")
        return Assign(text, value, pos=pos)

    def statements(self) -> list[Stmt]:
        out = []
        while not self.at("") and not self.at("}"):
            out.append(self.statement())
        return out

    # -- declarations -----------------------------------------------------

    def declarations(self) -> DeclEnv:
        enums: dict[str, list[str]] = {}
        decls: list[VariableDecl] = []
        seen: set[str] = set()
        while not self.at(""):
            kind, text, pos = self.next()
            if text == "enum":
                nkind, name, npos = self.next()
                if nkind != "name":
                    raise GuardSyntaxError("expected enum name", npos)
                if name in enums:
                    raise GuardSyntaxError(f"duplicate enum {name}", npos)
                self.expect("{")
                members = []
                while True:
                    mkind, member, mpos = self.next()
                    if mkind != "name":
                        raise GuardSyntaxError("expected enum member", mpos)
                    members.append(member)
                    if not self.accept(","):
                        break
                self.expect("}")
                self.accept(";")
                enums[name] = members
            elif text in ("uint", "bool", "bytes32", "address") or (kind == "name" and text in enums):
                vtype = _type_for(text, enums, pos)
                nkind, name, npos = self.next()
                if nkind != "name" or name in KEYWORDS:
                    raise GuardSyntaxError("expected variable name", npos)
                if name in seen:
                    raise GuardSyntaxError(f"duplicate variable {name}", npos)
                seen.add(name)
                self.expect(";")
                decls.append(VariableDecl(name, vtype))
            else:
                raise GuardSyntaxError(f"expected declaration, found {text!r}", pos)
        return DeclEnv(enums=enums, variables={d.name: d.type for d in decls}, order=decls)


def _type_for(name: str, enums: dict[str, list[str]], pos: int) -> Type:
    if name == "uint":
        return Type("uint")
    if name == "bool":
        return Type("bool")
    if name == "bytes32":
        return Type("bytes32")
    if name == "address":
        return Type("address")
    if name in enums:
        return enum_type(name)
    raise GuardSyntaxError(f"unknown type {name}", pos)


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    expr = p.expression()
    kind, tok, pos = p.peek()
    if kind != "eof":
        raise GuardSyntaxError(f"trailing input {tok!r}", pos)
    return expr


def parse_stmts(text: str) -> list[Stmt]:
    p = _Parser(text)
    stmts = p.statements()
    kind, tok, pos = p.peek()
    if kind != "eof":
        raise GuardSyntaxError(f"trailing input {tok!r}", pos)
    return stmts


def parse_declarations(text: str) -> DeclEnv:
    return _Parser(text).declarations()


def parse_type(text: str, enums: Optional[dict[str, list[str]]] = None) -> Type:
    return _type_for(text.strip(), enums or {}, 0)
