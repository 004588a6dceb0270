"""Concrete interpreter for original and transformed programs.

Statements and expressions are compiled to closures once per program. A run
owns a flat memory map: scalars are keyed by name (``"x"`` or ``"x.f"``),
array cells by ``(array, index)`` or ``(array, index, field)``.

Nondeterminism is resolved through a chooser. Havoc assignments (``u =
nd()``) store an unresolved :class:`Havoc` value which is only resolved when
read, so unread havocs never multiply the number of executions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from ..ast import (
    ArrayAccess, Assert, Assign, BinOp, Cond, CondAssign, Const, Field, For, If,
    LvalRead, Nd, NdRange, Program, ScalarType, Seq, Span, UnOp, Var, asserts,
    int_type,
)
from ..frontend.typecheck import common_type, decl_map, expr_type, lval_type
from .policy import NdPolicy


class RuntimeFault(Exception):
    """Undefined behaviour in the subset: division by zero, bad shift,
    out-of-bounds index."""


class OutOfFuel(Exception):
    pass


class _Horizon(Exception):
    """Raised once no assertion of interest can execute any more."""


@dataclass(frozen=True)
class Havoc:
    """An unresolved ``nd()`` value. ``uid`` identifies the choice within a
    run; ``conv`` lists the integer conversions applied since it was drawn."""

    uid: int
    base: ScalarType
    conv: tuple = ()


@dataclass
class Outcome:
    status: str  # 'pass' | 'fail' | 'error' | 'inconclusive'
    failed: tuple = ()  # assertion ordinals in execution order, first violation first
    span: Optional[Span] = None  # of the first violated assertion
    detail: str = ""
    choices: tuple = ()  # nd values in the order they were drawn
    trace: list = field(default_factory=list, repr=False)
    observed: frozenset = field(default=frozenset(), repr=False)

    @property
    def first(self) -> Optional[int]:
        return self.failed[0] if self.failed else None

    @property
    def key(self) -> tuple:
        return (self.status, self.failed)


class Chooser:
    """Depth-first walk over choice sequences by replay: each execution
    follows the recorded prefix and extends it with first choices."""

    def __init__(self):
        self.path: list[int] = []
        self.sizes: list[int] = []
        self.values: list[int] = []
        self.pos = 0

    def start(self) -> None:
        self.pos = 0
        del self.values[:]

    def choose(self, domain) -> int:
        if not domain:
            raise RuntimeFault("empty nondeterministic range")
        if self.pos < len(self.path):
            v = domain[self.path[self.pos]]
        else:
            self.path.append(0)
            self.sizes.append(len(domain))
            v = domain[0]
        self.pos += 1
        self.values.append(v)
        return v

    def advance(self) -> bool:
        del self.path[self.pos:]
        del self.sizes[self.pos:]
        while self.path and self.path[-1] + 1 >= self.sizes[-1]:
            self.path.pop()
            self.sizes.pop()
        if not self.path:
            return False
        self.path[-1] += 1
        return True


class FixedChooser:
    """Replays a recorded sequence of chosen values."""

    def __init__(self, values):
        self.values_in = list(values)
        self.values: list[int] = []
        self.pos = 0

    def start(self) -> None:
        self.pos = 0
        del self.values[:]

    def choose(self, domain) -> int:
        if self.pos >= len(self.values_in):
            raise RuntimeFault("replay ran out of recorded choices")
        v = self.values_in[self.pos]
        if v not in domain:
            raise RuntimeFault(f"recorded choice {v} is outside its domain")
        self.pos += 1
        self.values.append(v)
        return v


class _Run:
    __slots__ = ("state", "chooser", "policy", "memo", "fuel", "failed", "trace",
                 "observed", "array_default", "uid", "tracing", "horizon")

    def __init__(self, chooser, policy, fuel, array_default, tracing, horizon=None):
        self.state: dict = {}
        self.chooser = chooser
        self.policy = policy
        self.memo: dict = {}
        self.fuel = fuel
        self.failed: list = []
        self.trace: list = []
        self.observed: set = set()
        self.array_default = array_default
        self.uid = 0
        self.tracing = tracing
        self.horizon = horizon

    def resolve(self, h: Havoc) -> int:
        v = self.memo.get(h.uid)
        if v is None:
            v = self.chooser.choose(self.policy.domain(h.base))
            self.memo[h.uid] = v
        for ty in h.conv:
            v = ty.wrap(v)
        return v


def _div(a: int, b: int) -> int:
    if b == 0:
        raise RuntimeFault("division by zero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _mod(a: int, b: int) -> int:
    return a - b * _div(a, b)


_ARITH = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _div,
    "%": _mod,
    "&": lambda a, b: a & b,
    "|": lambda a, b: a | b,
    "^": lambda a, b: a ^ b,
}
_CMP = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


class Compiled:
    """A program compiled for repeated execution."""

    def __init__(self, program: Program, width: int = 32):
        self.program = program
        self.width = width
        self.decls = decl_map(program)
        self.sizes = {d.name: d.size for d in program.declarations if d.is_array}
        nodes = asserts(program.body)
        self.ordinals = {id(a): n for n, a in enumerate(nodes, start=1)}
        self.spans = {n: a.span for n, a in enumerate(nodes, start=1)}
        self.int = int_type(width)
        self._compiled_asserts = 0
        self.body = self.stmt(program.body)

    # -- lvalues ----------------------------------------------------------
    def lval(self, lv) -> tuple[Callable, ScalarType]:
        """Returns (key function, location type)."""
        ty = lval_type(self.decls, lv)
        if isinstance(lv, Var):
            name = lv.name
            return (lambda run: name), ty
        if isinstance(lv, Field) and isinstance(lv.base, Var):
            name = f"{lv.base.name}.{lv.field}"
            return (lambda run: name), ty
        acc = lv.base if isinstance(lv, Field) else lv
        fld = lv.field if isinstance(lv, Field) else None
        arr, size = acc.array, self.sizes[acc.array]
        idx = self.expr(acc.index)

        def key(run):
            i = idx(run)
            if not 0 <= i < size:
                raise RuntimeFault(f"index {i} out of bounds for {arr}[{size}]")
            return (arr, i, fld) if fld else (arr, i)

        return key, ty

    # -- expressions --------------------------------------------------------
    def ty(self, e) -> ScalarType:
        return expr_type(self.decls, e, self.width)

    def expr(self, e) -> Callable:
        """Compile an expression to a function returning a concrete value."""
        lazy = self.rhs(e)

        def force(run):
            v = lazy(run)
            return run.resolve(v) if isinstance(v, Havoc) else v

        if isinstance(e, (LvalRead, Nd, Cond)):
            return force
        return lazy

    def rhs(self, e) -> Callable:
        """Like :meth:`expr` but may return an unresolved :class:`Havoc`."""
        if isinstance(e, Const):
            v = self.ty(e).wrap(e.value)
            return lambda run: v
        if isinstance(e, LvalRead):
            key, lty = self.lval(e.lval)
            is_cell = not isinstance(e.lval, Var) and not (
                isinstance(e.lval, Field) and isinstance(e.lval.base, Var))

            def read(run):
                k = key(run)
                st = run.state
                if k in st:
                    v = st[k]
                else:
                    v = run.array_default if is_cell else 0
                    v = lty.wrap(v)
                return v

            return read
        if isinstance(e, Nd):
            base = self.int

            def fresh(run):
                run.uid += 1
                return Havoc(run.uid, base)

            return fresh
        if isinstance(e, NdRange):
            lo, hi, full = e.lo, e.hi, e.witness
            return lambda run: run.chooser.choose(run.policy.range_domain(lo, hi, full))
        if isinstance(e, Cond):
            c = self.expr(e.cond)
            t, o = self.rhs(e.then), self.rhs(e.orelse)
            ty = self.ty(e)

            def cond(run):
                v = t(run) if c(run) else o(run)
                if isinstance(v, Havoc):
                    return Havoc(v.uid, v.base, v.conv + (ty,))
                return ty.wrap(v)

            return cond
        if isinstance(e, UnOp):
            x = self.expr(e.operand)
            ty = self.ty(e)
            if e.op == "!":
                return lambda run: 0 if x(run) else 1
            if e.op == "-":
                return lambda run: ty.wrap(-ty.wrap(x(run)))
            if e.op == "~":
                return lambda run: ty.wrap(~ty.wrap(x(run)))
            if e.op == "+":
                return lambda run: ty.wrap(x(run))
            raise ValueError(f"unknown unary operator {e.op}")
        if isinstance(e, BinOp):
            return self.binop(e)
        raise TypeError(f"not an expression: {e!r}")

    def binop(self, e: BinOp) -> Callable:
        a, b = self.expr(e.left), self.expr(e.right)
        op = e.op
        if op == "&&":
            return lambda run: 1 if a(run) and b(run) else 0
        if op == "||":
            return lambda run: 1 if a(run) or b(run) else 0
        lt, rt = self.ty(e.left), self.ty(e.right)
        if op in ("<<", ">>"):
            ty = self.ty(e)
            bits = ty.bits

            def shift(run):
                x, n = ty.wrap(a(run)), b(run)
                if n < 0 or n >= bits:
                    raise RuntimeFault(f"shift by {n}")
                return ty.wrap(x << n if op == "<<" else x >> n)

            return shift
        ct = common_type(lt, rt, self.width)
        if op in _CMP:
            f = _CMP[op]
            return lambda run: 1 if f(ct.wrap(a(run)), ct.wrap(b(run))) else 0
        f = _ARITH[op]
        return lambda run: ct.wrap(f(ct.wrap(a(run)), ct.wrap(b(run))))

    # -- statements -----------------------------------------------------------
    def store(self, target) -> Callable:
        key, lty = self.lval(target)

        def put(run, v):
            k = key(run)
            if isinstance(v, Havoc):
                v = Havoc(v.uid, v.base, v.conv + (lty,))
            else:
                v = lty.wrap(v)
                run.observed.add(v)
            run.state[k] = v

        return put

    def stmt(self, s) -> Callable:
        if isinstance(s, Seq):
            # (statement, number of assertions at or before its end)
            parts = []
            for c in s.stmts:
                parts.append((self.stmt(c), self._compiled_asserts))
            parts = tuple(parts)

            def block(run):
                h = run.horizon
                for p, upto in parts:
                    p(run)
                    if h is not None and upto >= h:
                        raise _Horizon()

            return block
        if isinstance(s, Assign):
            put, val = self.store(s.target), self.rhs(s.value)
            return lambda run: put(run, val(run))
        if isinstance(s, CondAssign):
            # the else operand is effect-free and its value is discarded
            put, val, c = self.store(s.target), self.rhs(s.value), self.expr(s.cond)

            def cassign(run):
                if c(run):
                    put(run, val(run))

            return cassign
        if isinstance(s, Assert):
            ordinal = self.ordinals[id(s)]
            self._compiled_asserts += 1
            c = self.expr(s.cond)

            def check(run):
                if run.tracing:
                    run.trace.append((ordinal, dict(run.state), dict(run.memo)))
                if not c(run) and ordinal not in run.failed:
                    run.failed.append(ordinal)

            return check
        if isinstance(s, If):
            c, t = self.expr(s.cond), self.stmt(s.then)
            o = self.stmt(s.orelse) if s.orelse is not None else None

            def branch(run):
                if c(run):
                    t(run)
                elif o is not None:
                    o(run)

            return branch
        if isinstance(s, For):
            put = self.store(Var(s.iterator))
            init, test, step = self.expr(s.init), self.expr(s.test), self.expr(s.step)
            body = self.stmt(s.body)

            def loop(run):
                put(run, init(run))
                while test(run):
                    run.fuel -= 1
                    if run.fuel < 0:
                        raise OutOfFuel()
                    body(run)
                    put(run, step(run))

            return loop
        raise TypeError(f"not a statement: {s!r}")

    # -- execution --------------------------------------------------------------
    def execute(self, chooser, policy: NdPolicy, *, fuel: int = 1_000_000,
                array_default: int = 0, initial: Optional[dict] = None,
                tracing: bool = False, horizon: Optional[int] = None) -> Outcome:
        """``horizon``: stop once every statement holding an assertion with
        ordinal at most this value is behind the run. Only meaningful for
        loop-free programs, where textual order is execution order."""
        chooser.start()
        run = _Run(chooser, policy, fuel, array_default, tracing, horizon)
        if initial:
            run.state.update(initial)
        try:
            self.body(run)
        except RuntimeFault as exc:
            return Outcome("error", tuple(run.failed), detail=str(exc),
                           choices=tuple(chooser.values), trace=run.trace)
        except _Horizon:
            pass
        except OutOfFuel:
            return Outcome("inconclusive", tuple(run.failed), detail="fuel exhausted",
                           choices=tuple(chooser.values), trace=run.trace)
        failed = tuple(run.failed)
        status = "fail" if failed else "pass"
        return Outcome(status, failed, span=self.spans.get(failed[0]) if failed else None,
                       choices=tuple(chooser.values), trace=run.trace,
                       observed=frozenset(run.observed))
