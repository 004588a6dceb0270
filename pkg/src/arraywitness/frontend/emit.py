"""Deterministic pretty-printer. ``parse(emit(p))`` reproduces ``p``."""
from __future__ import annotations

from ..ast import (
    ArrayAccess, Assert, Assign, BinOp, Cond, CondAssign, Const, Field, For, If,
    LvalRead, Nd, NdRange, Program, Seq, UnOp, Var, VarDecl, stmt_list,
)
from .parser import DEFAULT_NAMING, PRECEDENCE, NdNaming

INDENT = "  "
_UNARY_PREC = len(PRECEDENCE) + 100
_ATOM_PREC = _UNARY_PREC + 1


class Emitter:
    def __init__(self, naming: NdNaming = DEFAULT_NAMING):
        self.naming = naming

    # expressions return (text, precedence)
    def expr(self, e) -> tuple[str, int]:
        if isinstance(e, Const):
            text = str(e.value) + ("u" if e.unsigned else "")
            return text, (_UNARY_PREC if e.value < 0 else _ATOM_PREC)
        if isinstance(e, LvalRead):
            return self.lval(e.lval), _ATOM_PREC
        if isinstance(e, Nd):
            return f"{self.naming.nd}()", _ATOM_PREC
        if isinstance(e, NdRange):
            return f"{self.naming.nd_range}({e.lo}, {e.hi})", _ATOM_PREC
        if isinstance(e, UnOp):
            inner, p = self.expr(e.operand)
            if p < _UNARY_PREC or (isinstance(e.operand, (UnOp, Const)) and inner.startswith(("-", "!", "~"))):
                inner = f"({inner})"
            return f"{e.op}{inner}", _UNARY_PREC
        if isinstance(e, BinOp):
            prec = PRECEDENCE[e.op]
            left, lp = self.expr(e.left)
            right, rp = self.expr(e.right)
            if lp < prec:
                left = f"({left})"
            if rp <= prec:
                right = f"({right})"
            return f"{left} {e.op} {right}", prec
        if isinstance(e, Cond):
            return f"(({self.text(e.cond)}) ? {self.text(e.then)} : {self.text(e.orelse)})", _ATOM_PREC
        raise TypeError(f"cannot emit {e!r}")

    def text(self, e) -> str:
        return self.expr(e)[0]

    def lval(self, lv) -> str:
        if isinstance(lv, Var):
            return lv.name
        if isinstance(lv, ArrayAccess):
            return f"{lv.array}[{self.text(lv.index)}]"
        if isinstance(lv, Field):
            return f"{self.lval(lv.base)}.{lv.field}"
        raise TypeError(f"cannot emit {lv!r}")

    def step(self, s: For) -> str:
        e = s.step
        if (isinstance(e, BinOp) and e.op in "+-" and e.right == Const(1)
                and e.left == LvalRead(Var(s.iterator))):
            return f"{s.iterator}{e.op * 2}"
        return f"{s.iterator} = {self.text(e)}"

    def stmt(self, s, depth: int, out: list[str]) -> None:
        pad = INDENT * depth
        if isinstance(s, Seq):
            for c in s.stmts:
                self.stmt(c, depth, out)
        elif isinstance(s, Assign):
            out.append(f"{pad}{self.lval(s.target)} = {self.text(s.value)};")
        elif isinstance(s, CondAssign):
            out.append(f"{pad}({self.text(s.cond)}) ? {self.lval(s.target)} = "
                       f"{self.text(s.value)} : {self.text(s.otherwise)};")
        elif isinstance(s, Assert):
            out.append(f"{pad}assert({self.text(s.cond)});")
        elif isinstance(s, If):
            out.append(f"{pad}if ({self.text(s.cond)}) {{")
            self.block(s.then, depth, out)
            if s.orelse is not None:
                out.append(f"{pad}}} else {{")
                self.block(s.orelse, depth, out)
            out.append(f"{pad}}}")
        elif isinstance(s, For):
            out.append(f"{pad}for ({s.iterator} = {self.text(s.init)}; {self.text(s.test)}; "
                       f"{self.step(s)}) {{")
            self.block(s.body, depth, out)
            out.append(f"{pad}}}")
        else:
            raise TypeError(f"cannot emit {s!r}")

    def block(self, s, depth: int, out: list[str]) -> None:
        for c in stmt_list(s):
            self.stmt(c, depth + 1, out)


def emit_declarations(decls: tuple[VarDecl, ...]) -> list[str]:
    out: list[str] = []
    seen_tags: set[str] = set()
    for d in decls:
        if d.is_record and d.struct_tag not in seen_tags:
            seen_tags.add(d.struct_tag)
            out.append(f"struct {d.struct_tag} {{")
            for fname, ftype in d.fields:
                out.append(f"{INDENT}{ftype.spelling} {fname};")
            out.append("};")
    for d in decls:
        base = f"struct {d.struct_tag}" if d.is_record else d.scalar.spelling
        suffix = f"[{d.size}]" if d.is_array else ""
        out.append(f"{base} {d.name}{suffix};")
    return out


def emit(program: Program, naming: NdNaming = DEFAULT_NAMING, prelude: str = "") -> str:
    """Render ``program`` as C-like text wrapped in ``main``."""
    em = Emitter(naming)
    lines: list[str] = []
    if prelude:
        lines.extend(prelude.rstrip("\n").split("\n"))
        lines.append("")
    lines.extend(emit_declarations(program.declarations))
    lines.append("")
    lines.append("int main(void)")
    lines.append("{")
    for s in stmt_list(program.body):
        em.stmt(s, 1, lines)
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_expr(e, naming: NdNaming = DEFAULT_NAMING) -> str:
    return Emitter(naming).text(e)


def emit_stmt(s, naming: NdNaming = DEFAULT_NAMING) -> str:
    out: list[str] = []
    Emitter(naming).stmt(s, 0, out)
    return "\n".join(out)
