"""Small deterministic expression/statement language for gateway conditions,
script tasks and task data-mapping operations.

The language is straight-line only: expressions over process variables,
assignments and `require` preconditions. Arithmetic is 256-bit wrapping,
matching the word semantics the generated contract code relies on.
"""

from .ast import (
    Assign,
    Binary,
    EnumMember,
    Expr,
    Lit,
    Require,
    Stmt,
    Unary,
    Var,
    to_source,
)
from .parser import GuardSyntaxError, parse_declarations, parse_expr, parse_stmts
from .typecheck import (
    BOOL,
    BYTES32,
    ADDRESS,
    UINT,
    DeclEnv,
    GuardTypeError,
    Type,
    VariableDecl,
    check_expr,
    check_stmts,
    enum_type,
)
from .interp import (
    DivisionByZero,
    Revert,
    VarEnv,
    coerce_value,
    eval_expr,
    exec_stmts,
    render_value,
    zero_value,
)

__all__ = [
    "Assign", "Binary", "EnumMember", "Expr", "Lit", "Require", "Stmt",
    "Unary", "Var", "to_source",
    "GuardSyntaxError", "parse_declarations", "parse_expr", "parse_stmts",
    "BOOL", "BYTES32", "ADDRESS", "UINT", "DeclEnv", "GuardTypeError",
    "Type", "VariableDecl", "check_expr", "check_stmts", "enum_type",
    "DivisionByZero", "Revert", "VarEnv", "coerce_value", "eval_expr",
    "exec_stmts", "render_value", "zero_value",
]
