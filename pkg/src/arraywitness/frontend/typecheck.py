from __future__ import annotations

from typing import Mapping, Optional

from ..ast import (
    ArrayAccess, Assert, Assign, BinOp, Cond, CondAssign, Const, Field, For, If,
    LvalRead, Nd, NdRange, Program, ScalarType, Seq, UnOp, Var, VarDecl,
)
from .errors import Diagnostic


class TypeProblem(Exception):
    def __init__(self, message: str, span=None):
        super().__init__(message)
        self.span = span


def lval_type(decls: Mapping[str, VarDecl], lv) -> ScalarType:
    """Scalar type of an lvalue; raises TypeProblem when it is not scalar-valued."""
    if isinstance(lv, Var):
        d = decls.get(lv.name)
        if d is None:
            raise TypeProblem(f"undeclared variable {lv.name!r}", lv.span)
        if d.is_array:
            raise TypeProblem(f"array {lv.name!r} used without an index", lv.span)
        if d.is_record:
            raise TypeProblem(f"record {lv.name!r} must be accessed through a field", lv.span)
        return d.scalar
    if isinstance(lv, ArrayAccess):
        d = decls.get(lv.array)
        if d is None:
            raise TypeProblem(f"undeclared variable {lv.array!r}", lv.span)
        if not d.is_array:
            raise TypeProblem(f"{lv.array!r} is not an array", lv.span)
        if d.is_record:
            raise TypeProblem(f"element of {lv.array!r} must be accessed through a field", lv.span)
        return d.scalar
    if isinstance(lv, Field):
        base = lv.base
        if isinstance(base, Field):
            raise TypeProblem("nested field access is not supported", lv.span)
        name = base.array if isinstance(base, ArrayAccess) else base.name
        d = decls.get(name)
        if d is None:
            raise TypeProblem(f"undeclared variable {name!r}", lv.span)
        if isinstance(base, Var) and d.is_array:
            raise TypeProblem(f"array {name!r} used without an index", lv.span)
        if isinstance(base, ArrayAccess) and not d.is_array:
            raise TypeProblem(f"{name!r} is not an array", lv.span)
        if not d.is_record:
            raise TypeProblem(f"{name!r} has no fields", lv.span)
        ty = d.field_type(lv.field)
        if ty is None:
            raise TypeProblem(f"{name!r} has no field {lv.field!r}", lv.span)
        return ty
    raise TypeProblem(f"not an lvalue: {lv!r}")


def promote(t: ScalarType, width: int) -> ScalarType:
    if t.bits < width:
        return ScalarType("int", width, True)
    return t


def common_type(a: ScalarType, b: ScalarType, width: int) -> ScalarType:
    a, b = promote(a, width), promote(b, width)
    if a.bits != b.bits:
        return a if a.bits > b.bits else b
    if not a.signed:
        return a
    return b


def expr_type(decls: Mapping[str, VarDecl], e, width: int = 32) -> ScalarType:
    """Static C type of an expression under the usual arithmetic conversions."""
    if isinstance(e, Const):
        return ScalarType("unsigned int", width, False) if e.unsigned else ScalarType("int", width, True)
    if isinstance(e, LvalRead):
        return promote(lval_type(decls, e.lval), width)
    if isinstance(e, (Nd, NdRange)):
        return ScalarType("int", width, True)
    if isinstance(e, UnOp):
        if e.op == "!":
            return ScalarType("int", width, True)
        return promote(expr_type(decls, e.operand, width), width)
    if isinstance(e, BinOp):
        if e.op in ("==", "!=", "<", "<=", ">", ">=", "&&", "||"):
            return ScalarType("int", width, True)
        lt = expr_type(decls, e.left, width)
        if e.op in ("<<", ">>"):
            return lt
        return common_type(lt, expr_type(decls, e.right, width), width)
    if isinstance(e, Cond):
        return common_type(expr_type(decls, e.then, width), expr_type(decls, e.orelse, width), width)
    raise TypeProblem(f"not an expression: {e!r}")


def check_program(program: Program) -> list[Diagnostic]:
    problems: list[Diagnostic] = []
    decls: dict[str, VarDecl] = {}
    for d in program.declarations:
        if d.name in decls:
            problems.append(Diagnostic("type", f"{d.name!r} declared twice", d.span))
        decls[d.name] = d

    def expr(e) -> None:
        if isinstance(e, LvalRead):
            lval(e.lval)
        elif isinstance(e, BinOp):
            expr(e.left)
            expr(e.right)
        elif isinstance(e, UnOp):
            expr(e.operand)
        elif isinstance(e, Cond):
            expr(e.cond)
            expr(e.then)
            expr(e.orelse)

    def lval(lv) -> None:
        try:
            lval_type(decls, lv)
        except TypeProblem as exc:
            problems.append(Diagnostic("type", str(exc), exc.span))
        inner = lv.base if isinstance(lv, Field) else lv
        if isinstance(inner, ArrayAccess):
            expr(inner.index)

    def stmt(s) -> None:
        if isinstance(s, Seq):
            for c in s.stmts:
                stmt(c)
        elif isinstance(s, Assign):
            lval(s.target)
            expr(s.value)
        elif isinstance(s, CondAssign):
            expr(s.cond)
            lval(s.target)
            expr(s.value)
            expr(s.otherwise)
        elif isinstance(s, Assert):
            expr(s.cond)
        elif isinstance(s, If):
            expr(s.cond)
            stmt(s.then)
            if s.orelse is not None:
                stmt(s.orelse)
        elif isinstance(s, For):
            d = decls.get(s.iterator)
            if d is None:
                problems.append(Diagnostic("type", f"undeclared variable {s.iterator!r}", s.span))
            elif d.is_array or d.is_record:
                problems.append(Diagnostic("type", f"loop iterator {s.iterator!r} must be a scalar", s.span))
            expr(s.init)
            expr(s.test)
            expr(s.step)
            stmt(s.body)

    stmt(program.body)
    return problems


def decl_map(program: Program) -> dict[str, VarDecl]:
    return {d.name: d for d in program.declarations}


def element_type(decl: VarDecl) -> Optional[ScalarType]:
    return decl.scalar
