"""Parser for the task data-mapping syntax
`(<type> <name>, ...) : (<type> <name>, ...) -> { <operations> }`."""

from __future__ import annotations

from typing import Optional

from ..guardlang import DeclEnv, GuardSyntaxError, VariableDecl, to_source
from ..guardlang.parser import _Parser, _type_for
from ..guardlang.typecheck import GuardTypeError, check_stmts
from .errors import AnnotationSyntaxError, UndeclaredVariableError
from .model import TaskAnnotation


def parse_annotation(text: str, decls: Optional[DeclEnv] = None) -> TaskAnnotation:
    """Parse an annotation. When a declaration environment is supplied the
    operations are type-checked against variables plus import parameters."""
    if not text.strip():
        return TaskAnnotation()
    try:
        p = _Parser(text)
        exports = _param_list(p, decls)
        p.expect(":")
        imports = _param_list(p, decls)
        p.expect("->")
        p.expect("{")
        ops = p.statements()
        p.expect("}")
        kind, tok, pos = p.peek()
        if kind != "eof":
            raise GuardSyntaxError(f"trailing input {tok!r}", pos)
    except GuardSyntaxError as e:
        raise AnnotationSyntaxError(str(e), e.pos) from e
    annotation = TaskAnnotation(exports=exports, imports=imports, operations=ops)
    if decls is not None:
        _check_annotation(annotation, decls)
    return annotation


def _param_list(p: _Parser, decls: Optional[DeclEnv]) -> list[VariableDecl]:
    p.expect("(")
    params: list[VariableDecl] = []
    if p.accept(")"):
        return params
    enums = decls.enums if decls is not None else {}
    while True:
        tkind, tname, tpos = p.next()
        if tkind != "name" and tname not in ("uint", "bool", "bytes32", "address"):
            raise GuardSyntaxError(f"expected parameter type, found {tname!r}", tpos)
        if decls is None and tname not in ("uint", "bool", "bytes32", "address"):
            # without declarations, treat unknown type names as enum references
            enums = dict(enums)
            enums.setdefault(tname, [])
        ptype = _type_for(tname, enums, tpos)
        nkind, pname, npos = p.next()
        if nkind != "name":
            raise GuardSyntaxError(f"expected parameter name, found {pname!r}", npos)
        params.append(VariableDecl(pname, ptype))
        if not p.accept(","):
            break
    p.expect(")")
    return params


def _check_annotation(a: TaskAnnotation, decls: DeclEnv) -> None:
    for p in a.exports:
        if p.name not in decls.variables:
            raise UndeclaredVariableError(p.name)
        if decls.variables[p.name] != p.type:
            raise AnnotationSyntaxError(
                f"export {p.name} declared as {p.type.render()} but variable is "
                f"{decls.variables[p.name].render()}", 0)
    for p in a.imports:
        if p.name in decls.variables:
            raise AnnotationSyntaxError(
                f"import parameter {p.name} shadows a process variable", 0)
    env = decls.extended(a.imports)
    try:
        check_stmts(a.operations, env)
    except GuardTypeError as e:
        if "unknown name" in str(e) or "undeclared name" in str(e):
            raise UndeclaredVariableError(str(e)) from e
        raise


def render_annotation(a: TaskAnnotation) -> str:
    exports = ", ".join(f"{p.type.render()} {p.name}" for p in a.exports)
    imports = ", ".join(f"{p.type.render()} {p.name}" for p in a.imports)
    ops = " ".join(to_source(s) for s in a.operations)
    body = f"{{ {ops} }}" if ops else "{}"
    return f"({exports}) : ({imports}) -> {body}"
