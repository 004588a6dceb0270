"""Recursive-descent parser for the array language.

Input programs are a list of global declarations followed by statements,
either at top level or wrapped in ``main``. With ``transformed=True`` the
parser also accepts the constructs the transformation introduces: ``nd()``,
``nd(l,u)``, conditional expressions and conditional assignments.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..ast import (
    ArrayAccess, Assert, Assign, BinOp, Cond, CondAssign, Const, Expr, Field,
    For, If, LvalRead, Nd, NdRange, Program, ScalarType, Seq, Span, Stmt, UnOp,
    Var, VarDecl, seq,
)
from .errors import Diagnostic, ParseError
from .lexer import Token, tokenize
from .typecheck import check_program


@dataclass(frozen=True)
class NdNaming:
    """Spelling of the two nondeterministic-value helpers in program text."""

    nd: str = "nd"
    nd_range: str = "nd"


DEFAULT_NAMING = NdNaming()

# binary operator precedence, loosest first
BINARY_LEVELS: list[tuple[str, ...]] = [
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("<<", ">>"),
    ("+", "-"),
    ("*", "/", "%"),
]
PRECEDENCE = {op: lvl for lvl, ops in enumerate(BINARY_LEVELS) for op in ops}

_TYPE_WORDS = {"int", "unsigned", "signed", "char", "short", "long", "_Bool"}
_UNSUPPORTED_STMT = {
    "while": "while loops", "do": "do-while loops", "switch": "switch statements",
    "goto": "goto", "break": "break", "continue": "continue",
    "typedef": "typedef", "union": "unions", "enum": "enums",
}
_COMPOUND = {"+=": "+", "-=": "-", "*=": "*", "/=": "/", "%=": "%",
             "&=": "&", "|=": "|", "^=": "^", "<<=": "<<", ">>=": ">>"}


def scalar_type(words: list[str], int_width: int = 32) -> Optional[ScalarType]:
    unsigned = "unsigned" in words
    base = [w for w in words if w not in ("signed", "unsigned")]
    if base == ["_Bool"] and len(words) == 1:
        return ScalarType("_Bool", 1, False)
    if base in (["char"],):
        return ScalarType("unsigned char" if unsigned else "char", 8, not unsigned)
    if base in (["short"], ["short", "int"]):
        return ScalarType("unsigned short" if unsigned else "short", 16, not unsigned)
    if base in (["long"], ["long", "int"], ["long", "long"], ["long", "long", "int"]):
        return ScalarType("unsigned long" if unsigned else "long", 64, not unsigned)
    if base in ([], ["int"]):
        return ScalarType("unsigned int" if unsigned else "int", int_width, not unsigned)
    return None


class Parser:
    def __init__(self, text: str, *, transformed: bool = False,
                 naming: NdNaming = DEFAULT_NAMING, int_width: int = 32):
        self.toks = tokenize(text)
        self.pos = 0
        self.transformed = transformed
        self.naming = naming
        self.int_width = int_width
        self.decls: list[VarDecl] = []
        self.structs: dict[str, tuple[tuple[str, ScalarType], ...]] = {}
        self._anon = 0
        self._statement_head = False

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("punct", "kw") and self.tok.text in texts

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, message: str, *expected: str, kind: str = "syntax",
              span: Optional[Span] = None) -> ParseError:
        return ParseError([Diagnostic(kind, message, span or self.tok.span, tuple(expected))])

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"unexpected {found!r}", repr(text))
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "id":
            found = self.tok.text or "end of input"
            raise self.error(f"unexpected {found!r}", "identifier")
        return self.advance()

    def unsupported(self, what: str, span: Optional[Span] = None) -> ParseError:
        return self.error(f"{what} not supported", kind="unsupported", span=span)

    # -- top level ----------------------------------------------------------

    def parse_program(self) -> Program:
        stmts: list[Stmt] = []
        saw_main = False
        while self.tok.kind != "eof":
            if self._at_declaration():
                if self._at_function():
                    if saw_main:
                        raise self.unsupported("functions other than main")
                    stmts.extend(self._main())
                    saw_main = True
                else:
                    self._declaration()
            elif self.tok.kind == "id" and self.tok.text == "main" and self.peek().text == "(":
                if saw_main:
                    raise self.unsupported("functions other than main")
                stmts.extend(self._main())
                saw_main = True
            else:
                if saw_main:
                    raise self.error("statement after main", kind="unsupported")
                stmts.append(self.statement())
        return Program(tuple(self.decls), seq(stmts))

    def _at_declaration(self) -> bool:
        t = self.tok
        return t.kind == "kw" and (t.text in _TYPE_WORDS or t.text in ("struct", "void", "static", "const", "volatile"))

    def _at_function(self) -> bool:
        # type words followed by identifier and '('
        k = 0
        while self.peek(k).kind == "kw" and self.peek(k).text in _TYPE_WORDS | {"void"}:
            k += 1
        return k > 0 and self.peek(k).kind == "id" and self.peek(k + 1).text == "("

    def _main(self) -> list[Stmt]:
        while self.at(*(_TYPE_WORDS | {"void"})):
            self.advance()
        name = self.ident()
        if name.text != "main":
            raise self.unsupported("functions other than main", name.span)
        self.expect("(")
        if self.at("void"):
            self.advance()
        self.expect(")")
        self.expect("{")
        stmts: list[Stmt] = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("unexpected end of input", "'}'")
            if self._at_declaration():
                self._declaration()
            elif self.at("return"):
                self.advance()
                if not self.at(";"):
                    self.expression()
                self.expect(";")
                if not self.at("}"):
                    raise self.unsupported("return before the end of main")
            else:
                stmts.append(self.statement())
        self.expect("}")
        return stmts

    def _type_words(self) -> list[str]:
        words = []
        while self.at(*_TYPE_WORDS):
            words.append(self.advance().text)
        return words

    def _declaration(self) -> None:
        start = self.tok
        if self.at("static", "const", "volatile", "void"):
            raise self.unsupported(f"'{start.text}' declarations")
        fields: tuple[tuple[str, ScalarType], ...] = ()
        scalar: Optional[ScalarType] = None
        tag: Optional[str] = None
        if self.at("struct"):
            self.advance()
            if self.tok.kind == "id":
                tag = self.advance().text
            if self.at("{"):
                fields = self._struct_body()
                if tag is None:
                    tag = self._fresh_tag()
                if tag in self.structs:
                    raise self.error(f"struct {tag} redefined", kind="type", span=start.span)
                self.structs[tag] = fields
            elif tag is None:
                raise self.error("expected struct tag or body", "identifier", "'{'")
            else:
                if tag not in self.structs:
                    raise self.error(f"unknown struct {tag}", kind="type", span=start.span)
                fields = self.structs[tag]
            if self.at(";"):
                self.advance()
                return
        else:
            words = self._type_words()
            scalar = scalar_type(words, self.int_width)
            if scalar is None:
                raise self.error(f"invalid type {' '.join(words)!r}", kind="type", span=start.span)
        while True:
            if self.at("*"):
                raise self.unsupported("pointers")
            name = self.ident()
            size: Optional[int] = None
            if self.at("["):
                self.advance()
                if self.tok.kind != "num":
                    raise self.error("array size must be an integer constant", "integer")
                size, _ = _int_literal(self.advance().text)
                self.expect("]")
                if self.at("["):
                    raise self.unsupported("multi-dimensional arrays", name.span)
                if size < 1:
                    raise self.error("array size must be at least 1", kind="type", span=name.span)
            if self.at("("):
                raise self.unsupported("functions other than main", name.span)
            if self.at("="):
                raise self.unsupported("declaration initialisers", self.tok.span)
            self.decls.append(VarDecl(name.text, scalar=scalar, fields=fields, size=size,
                                      struct_tag=tag, span=name.span))
            if self.at(","):
                self.advance()
                continue
            self.expect(";")
            return

    def _fresh_tag(self) -> str:
        self._anon += 1
        return f"anon_{self._anon}"

    def _struct_body(self) -> tuple[tuple[str, ScalarType], ...]:
        self.expect("{")
        fields = []
        while not self.at("}"):
            start = self.tok
            if self.at("struct"):
                raise self.unsupported("nested structures")
            words = self._type_words()
            ty = scalar_type(words, self.int_width) if words else None
            if ty is None:
                raise self.error("expected a scalar field type", "type", span=start.span)
            while True:
                if self.at("*"):
                    raise self.unsupported("pointers")
                fname = self.ident()
                if self.at("["):
                    raise self.unsupported("array-typed fields", fname.span)
                fields.append((fname.text, ty))
                if self.at(","):
                    self.advance()
                    continue
                break
            self.expect(";")
        self.expect("}")
        if not fields:
            raise self.error("structure without fields", kind="type")
        return tuple(fields)

    # -- statements ---------------------------------------------------------

    def statement(self) -> Stmt:
        t = self.tok
        if t.kind == "kw":
            if t.text in _UNSUPPORTED_STMT:
                raise self.unsupported(_UNSUPPORTED_STMT[t.text])
            if t.text == "if":
                return self._if()
            if t.text == "for":
                return self._for()
            if t.text == "assert":
                self.advance()
                self.expect("(")
                cond = self.expression()
                self.expect(")")
                self.expect(";")
                return Assert(cond, span=t.span)
            if t.text == "return":
                raise self.unsupported("return before the end of main")
            if self._at_declaration():
                raise self.error("declarations must precede use in main", kind="unsupported")
        if self.at("{"):
            self.advance()
            stmts = []
            while not self.at("}"):
                if self.tok.kind == "eof":
                    raise self.error("unexpected end of input", "'}'")
                if self._at_declaration():
                    self._declaration()
                    continue
                stmts.append(self.statement())
            self.advance()
            return seq(stmts, span=t.span)
        if self.at(";"):
            self.advance()
            return Seq((), span=t.span)
        s = self._simple_statement()
        self.expect(";")
        return s

    def _simple_statement(self) -> Stmt:
        start = self.tok
        if self.at("++", "--"):
            op = self.advance().text
            lv = self._lvalue_of(self._unary(), start)
            return Assign(lv, BinOp(op[0], LvalRead(lv), Const(1)), span=start.span)
        self._statement_head = True
        lhs = self._binary(0)
        if self.at("?") and self.transformed:
            self.advance()
            target = self._lvalue_of(self._binary(0), self.tok)
            self.expect("=")
            value = self.expression()
            self.expect(":")
            otherwise = self.expression()
            return CondAssign(lhs, target, value, otherwise, span=start.span)
        lv = self._lvalue_of(lhs, start)
        if self.at("="):
            self.advance()
            return Assign(lv, self.expression(), span=start.span)
        if self.tok.text in _COMPOUND:
            op = _COMPOUND[self.advance().text]
            return Assign(lv, BinOp(op, LvalRead(lv), self.expression()), span=start.span)
        if self.at("++", "--"):
            op = self.advance().text
            return Assign(lv, BinOp(op[0], LvalRead(lv), Const(1)), span=start.span)
        raise self.error("expression statements are not supported", "'='", kind="unsupported")

    def _lvalue_of(self, e: Expr, where: Token):
        if isinstance(e, LvalRead):
            return e.lval
        raise self.error("not an assignable location", "lvalue", span=getattr(e, "span", None) or where.span)

    def _if(self) -> Stmt:
        t = self.advance()
        self.expect("(")
        cond = self.expression()
        self.expect(")")
        then = self.statement()
        orelse = None
        if self.at("else"):
            self.advance()
            orelse = self.statement()
        return If(cond, then, orelse, span=t.span)

    def _for(self) -> Stmt:
        t = self.advance()
        self.expect("(")
        if self._at_declaration():
            raise self.unsupported("declarations in for headers")
        it = self.ident()
        if not self.at("="):
            raise self.error("for header must start with 'iterator = expression'", "'='",
                             kind="unsupported")
        self.advance()
        init = self.expression()
        if self.at(","):
            raise self.unsupported("comma expressions in for headers")
        self.expect(";")
        test = self.expression()
        self.expect(";")
        step = self._step(it.text)
        self.expect(")")
        body = self.statement()
        return For(it.text, init, test, step, body, span=t.span)

    def _step(self, iterator: str) -> Expr:
        start = self.tok
        ivar = LvalRead(Var(iterator))
        if self.at("++", "--"):
            op = self.advance().text
            name = self.ident()
            if name.text != iterator:
                raise self.error("for step must update the loop iterator", kind="unsupported",
                                 span=name.span)
            return BinOp(op[0], ivar, Const(1))
        name = self.ident()
        if name.text != iterator:
            raise self.error("for step must update the loop iterator", kind="unsupported",
                             span=name.span)
        if self.at("++", "--"):
            return BinOp(self.advance().text[0], ivar, Const(1))
        if self.at("="):
            self.advance()
            return self.expression()
        if self.tok.text in _COMPOUND:
            op = _COMPOUND[self.advance().text]
            return BinOp(op, ivar, self.expression())
        raise self.error("unsupported for step", "'++'", "'--'", "'='", kind="unsupported",
                         span=start.span)

    # -- expressions --------------------------------------------------------

    def expression(self) -> Expr:
        cond = self._binary(0)
        if self.at("?"):
            if not self.transformed:
                raise self.unsupported("conditional expressions in input programs")
            t = self.advance()
            then = self.expression()
            self.expect(":")
            orelse = self.expression()
            return Cond(cond, then, orelse, span=t.span)
        return cond

    def _binary(self, level: int) -> Expr:
        if level == len(BINARY_LEVELS):
            return self._unary()
        left = self._binary(level + 1)
        ops = BINARY_LEVELS[level]
        while self.tok.kind == "punct" and self.tok.text in ops:
            t = self.advance()
            right = self._binary(level + 1)
            left = BinOp(t.text, left, right, span=t.span)
        return left

    def _unary(self) -> Expr:
        t = self.tok
        if self.at("-", "!", "~", "+"):
            self.advance()
            operand = self._unary()
            if t.text == "+":
                return operand
            if t.text == "-" and isinstance(operand, Const) and not operand.unsigned:
                return Const(-operand.value, span=t.span)
            return UnOp(t.text, operand, span=t.span)
        if self.at("*", "&"):
            raise self.unsupported("pointers")
        if self.at("++", "--"):
            raise self.unsupported("increment inside expressions")
        return self._postfix()

    def _postfix(self) -> Expr:
        # a trailing ++/-- is only allowed on the lvalue that starts a statement
        head, self._statement_head = self._statement_head, False
        t = self.tok
        if t.kind == "num":
            self.advance()
            value, unsigned = _int_literal(t.text)
            return Const(value, unsigned, span=t.span)
        if self.at("("):
            self.advance()
            e = self.expression()
            self.expect(")")
            return e
        if t.kind == "id" and self.peek().text == "(":
            return self._call()
        if t.kind != "id":
            found = t.text or "end of input"
            raise self.error(f"unexpected {found!r}", "expression")
        self.advance()
        lv = Var(t.text, span=t.span)
        while True:
            if self.at("["):
                b = self.advance()
                if not isinstance(lv, Var):
                    raise self.error("indexing is only allowed on array variables", kind="type",
                                     span=b.span)
                idx = self.expression()
                self.expect("]")
                lv = ArrayAccess(lv.name, idx, span=lv.span)
            elif self.at("."):
                self.advance()
                f = self.ident()
                lv = Field(lv, f.text, span=f.span)
            elif self.at("->"):
                raise self.unsupported("pointers")
            else:
                break
        if self.at("++", "--") and not (head and self.peek().text in (";", ")")):
            raise self.unsupported("increment inside expressions")
        return LvalRead(lv, span=t.span)

    def _call(self) -> Expr:
        t = self.advance()
        if self.transformed and t.text in (self.naming.nd, self.naming.nd_range):
            self.expect("(")
            if self.at(")") and t.text == self.naming.nd:
                self.advance()
                return Nd(span=t.span)
            if t.text != self.naming.nd_range:
                raise self.error(f"{t.text} takes no arguments", "')'")
            lo = self._signed_int()
            self.expect(",")
            hi = self._signed_int()
            self.expect(")")
            return NdRange(lo, hi, span=t.span)
        if t.text in ("nd", "nondet") and not self.transformed:
            raise self.error("nondeterministic values are not allowed in input programs",
                             kind="unsupported", span=t.span)
        raise self.unsupported("function calls", t.span)

    def _signed_int(self) -> int:
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        if self.tok.kind != "num":
            raise self.error("range bounds must be integer constants", "integer")
        value, _ = _int_literal(self.advance().text)
        return -value if neg else value


def _int_literal(text: str) -> tuple[int, bool]:
    unsigned = "u" in text.lower()
    digits = text.rstrip("uUlL")
    if digits[:2].lower() == "0x":
        return int(digits, 16), unsigned
    if len(digits) > 1 and digits.startswith("0"):
        return int(digits, 8), unsigned
    return int(digits), unsigned


def parse(source_text: str, *, transformed: bool = False, naming: NdNaming = DEFAULT_NAMING,
          int_width: int = 32) -> Program:
    """Parse and type-check a program.

    Raises :class:`ParseError` carrying every diagnostic found.
    """
    p = Parser(source_text, transformed=transformed, naming=naming, int_width=int_width)
    program = p.parse_program()
    problems = check_program(program)
    if problems:
        raise ParseError(problems)
    return program
