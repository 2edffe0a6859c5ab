import pytest
from hypothesis import given, strategies as st

from chainflow.guardlang import (
    Assign, Binary, EnumMember, Lit, Require, Unary, Var,
    BOOL, UINT, DeclEnv, DivisionByZero, GuardSyntaxError, GuardTypeError,
    Revert, VarEnv, VariableDecl, check_expr, check_stmts, enum_type,
    eval_expr, exec_stmts, parse_declarations, parse_expr, parse_stmts,
    to_source,
)
from chainflow.guardlang.ast import WORD_MODULUS


@pytest.fixture
def o2c_env():
    decls = parse_declarations(
        "enum POStatus {PENDING, ACCEPTED, REJECTED, CANCELED, CLOSED}"
        " bytes32 sku; uint quantity; uint price; POStatus status;"
    )
    return decls


def test_parse_simple_comparison():
    e = parse_expr("status == POStatus.ACCEPTED")
    assert e == Binary("==", Var("status"), EnumMember("POStatus", "ACCEPTED"))


def test_parse_precedence():
    e = parse_expr("a + b * c == d && !e")
    assert isinstance(e, Binary) and e.op == "&&"
    left = e.left
    assert isinstance(left, Binary) and left.op == "=="
    assert isinstance(left.left, Binary) and left.left.op == "+"
    assert isinstance(e.right, Unary) and e.right.op == "!"


def test_parse_stmts():
    stmts = parse_stmts(
        "require(decision == POStatus.ACCEPTED || decision == POStatus.REJECTED);"
        " status = decision;"
    )
    assert len(stmts) == 2
    assert isinstance(stmts[0], Require)
    assert stmts[1] == Assign("status", Var("decision"))


def test_parse_error_position():
    with pytest.raises(GuardSyntaxError):
        parse_expr("a + ")
    with pytest.raises(GuardSyntaxError):
        parse_stmts("x = 1")  # missing semicolon


def test_declarations(o2c_env):
    assert o2c_env.enums["POStatus"] == ["PENDING", "ACCEPTED", "REJECTED", "CANCELED", "CLOSED"]
    assert o2c_env.variables["quantity"] == UINT
    assert o2c_env.variables["status"] == enum_type("POStatus")
    assert [d.name for d in o2c_env.order] == ["sku", "quantity", "price", "status"]


def test_duplicate_declaration_rejected():
    with pytest.raises(GuardSyntaxError):
        parse_declarations("uint x; bool x;")


def test_typecheck_examples(o2c_env):
    # spec: running-example comparison is bool
    assert check_expr(parse_expr("status == POStatus.ACCEPTED"), o2c_env) == BOOL
    # spec: quantity * price is uint
    assert check_expr(parse_expr("quantity * price"), o2c_env) == UINT
    # spec: true && 3 is a type error
    with pytest.raises(GuardTypeError):
        check_expr(parse_expr("true && 3"), o2c_env)


def test_typecheck_unknown_name(o2c_env):
    with pytest.raises(GuardTypeError):
        check_expr(parse_expr("missing + 1"), o2c_env)


def test_typecheck_enum_mismatch(o2c_env):
    with pytest.raises(GuardTypeError):
        check_expr(parse_expr("status == 3"), o2c_env)
    with pytest.raises(GuardTypeError):
        check_stmts(parse_stmts("quantity = status;"), o2c_env)


def test_eval_arithmetic():
    env = VarEnv(DeclEnv())
    assert eval_expr(parse_expr("1 + 1"), env) == 2
    assert eval_expr(parse_expr("7 / 2"), env) == 3
    assert eval_expr(parse_expr("2 * 3 + 1"), env) == 7


def test_eval_wraps_modulo_word():
    env = VarEnv(DeclEnv())
    top = WORD_MODULUS - 1
    assert eval_expr(parse_expr(f"{top} + 1"), env) == 0
    assert eval_expr(parse_expr("0 - 1"), env) == top
    assert eval_expr(parse_expr("-1"), env) == top


def test_eval_division_by_zero():
    decls = parse_declarations("uint x;")
    env = VarEnv(decls, {"x": 5})
    with pytest.raises(DivisionByZero):
        eval_expr(parse_expr("x / 0"), env)


def test_eval_enum_comparison(o2c_env):
    decls = o2c_env.extended([VariableDecl("decision", enum_type("POStatus"))])
    env = VarEnv(decls, {"decision": decls.member_ordinal("POStatus", "REJECTED")})
    # spec: decision == ACCEPTED with decision=REJECTED is false
    assert eval_expr(parse_expr("decision == POStatus.ACCEPTED"), env) == 0


VALIDATE_PO_OPS = (
    "require(decision == POStatus.ACCEPTED || decision == POStatus.REJECTED);"
    " status = decision;"
)


def _validate_po_env(o2c_env, decision_member):
    decls = o2c_env.extended([VariableDecl("decision", enum_type("POStatus"))])
    env = VarEnv.initial(decls)
    env.values["decision"] = decls.member_ordinal("POStatus", decision_member)
    return decls, env


def test_exec_validate_po_accepted(o2c_env):
    decls, env = _validate_po_env(o2c_env, "ACCEPTED")
    out = exec_stmts(parse_stmts(VALIDATE_PO_OPS), env)
    assert out.values["status"] == decls.member_ordinal("POStatus", "ACCEPTED")
    # input env untouched
    assert env.values["status"] == 0


def test_exec_validate_po_pending_reverts(o2c_env):
    # derived by hand: PENDING fails the require
    _, env = _validate_po_env(o2c_env, "PENDING")
    with pytest.raises(Revert):
        exec_stmts(parse_stmts(VALIDATE_PO_OPS), env)


def test_exec_empty_is_identity(o2c_env):
    env = VarEnv.initial(o2c_env)
    out = exec_stmts([], env)
    assert out.values == env.values


def test_exec_is_pure(o2c_env):
    env = VarEnv.initial(o2c_env)
    before = dict(env.values)
    exec_stmts(parse_stmts("quantity = 4; price = quantity + 1;"), env)
    assert env.values == before


names = st.sampled_from(["a", "b", "c"])
uint_exprs = st.recursive(
    st.integers(min_value=0, max_value=2**64).map(lambda n: Lit(n, "uint")) | names.map(Var),
    lambda sub: st.tuples(st.sampled_from(["+", "-", "*"]), sub, sub).map(
        lambda t: Binary(t[0], t[1], t[2])
    ),
    max_leaves=12,
)


@given(uint_exprs, st.integers(0, 2**64), st.integers(0, 2**64), st.integers(0, 2**64))
def test_print_parse_roundtrip(expr, a, b, c):
    decls = parse_declarations("uint a; uint b; uint c;")
    env = VarEnv(decls, {"a": a, "b": b, "c": c})
    printed = to_source(expr)
    reparsed = parse_expr(printed)
    assert eval_expr(reparsed, env) == eval_expr(expr, env)
    # printing is a fixed point after one round
    assert to_source(reparsed) == printed
    assert parse_expr(to_source(reparsed)) == reparsed


def test_bytes32_literals():
    decls = parse_declarations("bytes32 sku;")
    env = VarEnv(decls, {"sku": "0x" + b"X1".ljust(32, b"\0").hex()})
    assert eval_expr(parse_expr('sku == "X1"'), env) == 1
    lit = parse_expr('"X1"')
    assert parse_expr(to_source(lit)) == lit
