"""AST for the input language and for witness-transformed programs.

Nodes are frozen dataclasses. Source spans are carried on every node but are
excluded from equality, so two programs compare structurally.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


@dataclass(frozen=True)
class Span:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


def _span() -> Optional[Span]:
    return field(default=None, compare=False, repr=False)


# -- types ------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarType:
    """Fixed-width integer type. ``spelling`` is what the emitter prints."""

    spelling: str
    bits: int
    signed: bool

    @property
    def is_bool(self) -> bool:
        return self.bits == 1

    @property
    def min(self) -> int:
        if self.is_bool:
            return 0
        return -(1 << (self.bits - 1)) if self.signed else 0

    @property
    def max(self) -> int:
        if self.is_bool:
            return 1
        return (1 << (self.bits - 1)) - 1 if self.signed else (1 << self.bits) - 1

    def wrap(self, value: int) -> int:
        if self.is_bool:
            return 1 if value else 0
        value &= (1 << self.bits) - 1
        if self.signed and value >= 1 << (self.bits - 1):
            value -= 1 << self.bits
        return value


def int_type(width: int = 32) -> ScalarType:
    return ScalarType("int", width, True)


@dataclass(frozen=True)
class VarDecl:
    """One global declaration.

    ``fields`` is non-empty exactly for record kinds; ``size`` is set exactly
    for array kinds. ``struct_tag`` names the record type when there is one.
    """

    name: str
    scalar: Optional[ScalarType] = None
    fields: tuple[tuple[str, ScalarType], ...] = ()
    size: Optional[int] = None
    struct_tag: Optional[str] = None
    span: Optional[Span] = _span()

    @property
    def is_array(self) -> bool:
        return self.size is not None

    @property
    def is_record(self) -> bool:
        return bool(self.fields)

    @property
    def kind(self) -> str:
        base = "record" if self.is_record else "scalar"
        return f"array-of-{base}" if self.is_array else base

    def field_type(self, name: str) -> Optional[ScalarType]:
        for fname, ftype in self.fields:
            if fname == name:
                return ftype
        return None


# -- lvalues ----------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ArrayAccess:
    array: str
    index: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Field:
    base: "Lval"
    field: str
    span: Optional[Span] = _span()


Lval = Union[Var, ArrayAccess, Field]


# -- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: int
    unsigned: bool = False
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class LvalRead:
    lval: Lval
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class UnOp:
    op: str
    operand: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Cond:
    """``c ? a : b``; only produced by the transformation."""

    cond: "Expr"
    then: "Expr"
    orelse: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Nd:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class NdRange:
    lo: int
    hi: int
    # witness-index initialisations are always enumerated over their full range
    witness: bool = field(default=False, compare=False)
    span: Optional[Span] = _span()


Expr = Union[Const, LvalRead, BinOp, UnOp, Cond, Nd, NdRange]


# -- statements -------------------------------------------------------------

@dataclass(frozen=True)
class Assign:
    target: Lval
    value: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class CondAssign:
    """``c ? target = value : otherwise;`` as produced for array writes."""

    cond: Expr
    target: Lval
    value: Expr
    otherwise: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Assert:
    cond: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    orelse: Optional["Stmt"] = None
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class For:
    """``for (iterator = init; test; iterator = step) body``.

    ``step`` is the iterator's next value, so ``i++`` is ``BinOp('+', i, 1)``.
    """

    iterator: str
    init: Expr
    test: Expr
    step: Expr
    body: "Stmt"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Seq:
    stmts: tuple["Stmt", ...]
    span: Optional[Span] = _span()


Stmt = Union[Assign, CondAssign, Assert, If, For, Seq]


def seq(stmts, span: Optional[Span] = None) -> Stmt:
    """Build a normalised sequence: nested sequences are flattened and a
    single statement is returned unwrapped."""
    flat: list[Stmt] = []
    for s in stmts:
        if isinstance(s, Seq):
            flat.extend(s.stmts)
        else:
            flat.append(s)
    if len(flat) == 1:
        return flat[0]
    return Seq(tuple(flat), span=span)


def stmt_list(stmt: Optional[Stmt]) -> tuple[Stmt, ...]:
    if stmt is None:
        return ()
    if isinstance(stmt, Seq):
        return stmt.stmts
    return (stmt,)


@dataclass(frozen=True)
class Program:
    declarations: tuple[VarDecl, ...]
    body: Stmt

    def decl(self, name: str) -> Optional[VarDecl]:
        for d in self.declarations:
            if d.name == name:
                return d
        return None

    @property
    def arrays(self) -> tuple[VarDecl, ...]:
        return tuple(d for d in self.declarations if d.is_array)


# -- traversal helpers ------------------------------------------------------

def walk_expr(e) -> Iterator:
    """Pre-order iteration over an expression or lvalue and everything in it."""
    yield e
    if isinstance(e, LvalRead):
        yield from walk_expr(e.lval)
    elif isinstance(e, ArrayAccess):
        yield from walk_expr(e.index)
    elif isinstance(e, Field):
        yield from walk_expr(e.base)
    elif isinstance(e, BinOp):
        yield from walk_expr(e.left)
        yield from walk_expr(e.right)
    elif isinstance(e, UnOp):
        yield from walk_expr(e.operand)
    elif isinstance(e, Cond):
        yield from walk_expr(e.cond)
        yield from walk_expr(e.then)
        yield from walk_expr(e.orelse)


def walk_stmt(s: Stmt) -> Iterator[Stmt]:
    yield s
    if isinstance(s, Seq):
        for c in s.stmts:
            yield from walk_stmt(c)
    elif isinstance(s, If):
        yield from walk_stmt(s.then)
        if s.orelse is not None:
            yield from walk_stmt(s.orelse)
    elif isinstance(s, For):
        yield from walk_stmt(s.body)


def stmt_exprs(s: Stmt) -> Iterator:
    """Expressions and lvalues held directly by ``s`` (not by children)."""
    if isinstance(s, Assign):
        yield s.target
        yield s.value
    elif isinstance(s, CondAssign):
        yield s.cond
        yield s.target
        yield s.value
        yield s.otherwise
    elif isinstance(s, Assert):
        yield s.cond
    elif isinstance(s, If):
        yield s.cond
    elif isinstance(s, For):
        yield s.init
        yield s.test
        yield s.step


def all_nodes(program: Program) -> Iterator:
    for s in walk_stmt(program.body):
        yield s
        for e in stmt_exprs(s):
            yield from walk_expr(e)


def lval_root(lv: Lval) -> str:
    while isinstance(lv, Field):
        lv = lv.base
    return lv.array if isinstance(lv, ArrayAccess) else lv.name


def lval_array(lv: Lval) -> Optional[ArrayAccess]:
    while isinstance(lv, Field):
        lv = lv.base
    return lv if isinstance(lv, ArrayAccess) else None


def asserts(stmt: Stmt) -> list[Assert]:
    return [s for s in walk_stmt(stmt) if isinstance(s, Assert)]


def iter_var(name: str) -> LvalRead:
    return LvalRead(Var(name))
