"""Random closed, terminating programs for the property suites.

Every array index is provably in bounds: it is either a constant below the
array size or the iterator of an enclosing loop whose range fits the array.
Loops have constant bounds, unit steps and bodies that never assign their
iterator, so every program terminates.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..ast import (
    ArrayAccess, Assert, Assign, BinOp, Const, Field, For, If, LvalRead, Program,
    ScalarType, Seq, Var, VarDecl, int_type, seq, walk_stmt,
)

DEFAULT_WEIGHTS = {
    "assign": 3,
    "write": 3,
    "loop": 3,
    "if": 1,
    "assert": 2,
    "invariant": 2,  # whole-program template: fill an array, then check it
}


@dataclass(frozen=True)
class GenLimits:
    max_size: int = 4
    max_bound: int = 4
    max_const: int = 3
    max_stmts: int = 12
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    seed: int = 0
    records: bool = True
    max_depth: int = 2

    def __post_init__(self):
        for name in ("max_size", "max_bound", "max_const", "max_stmts", "max_depth"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")


@dataclass
class _Loop:
    iterator: str
    lo: int
    hi: int  # inclusive


class _Gen:
    ITERATORS = ("i", "j")
    SCALARS = ("x", "y", "k")

    def __init__(self, limits: GenLimits):
        self.lim = limits
        self.rng = random.Random(limits.seed)
        self.int = int_type(32)
        self.budget = limits.max_stmts
        self.arrays: list[VarDecl] = []

    # -- declarations -------------------------------------------------------
    def declarations(self) -> list[VarDecl]:
        r = self.rng
        n_arrays = r.choice((1, 1, 2))
        for name in ("a", "b")[:n_arrays]:
            size = r.randint(1, self.lim.max_size)
            if self.lim.records and r.random() < 0.25:
                fields = (("p", self.int), ("q", self.int))
                self.arrays.append(VarDecl(name, fields=fields, size=size, struct_tag=f"S{name}"))
            else:
                self.arrays.append(VarDecl(name, scalar=self.int, size=size))
        scalars = [VarDecl(n, scalar=self.int) for n in self.ITERATORS + self.SCALARS]
        self.unsigned = r.random() < 0.2
        if self.unsigned:
            scalars.append(VarDecl("u", scalar=ScalarType("unsigned int", 32, False)))
        return self.arrays + scalars

    def scalar_names(self) -> list[str]:
        return list(self.SCALARS) + (["u"] if self.unsigned else [])

    # -- expressions ----------------------------------------------------------
    def const(self) -> Const:
        return Const(self.rng.randint(0, self.lim.max_const))

    def index(self, arr: VarDecl, loops: list[_Loop]):
        fits = [l for l in loops if 0 <= l.lo and l.hi < arr.size]
        if fits and self.rng.random() < 0.75:
            return LvalRead(Var(self.rng.choice(fits).iterator))
        return Const(self.rng.randint(0, arr.size - 1))

    def element(self, arr: VarDecl, loops: list[_Loop]):
        acc = ArrayAccess(arr.name, self.index(arr, loops))
        if arr.is_record:
            return Field(acc, self.rng.choice(arr.fields)[0])
        return acc

    def leaf(self, loops: list[_Loop]):
        r = self.rng.random()
        if r < 0.3:
            return self.const()
        if r < 0.6 and self.arrays:
            return LvalRead(self.element(self.rng.choice(self.arrays), loops))
        names = self.scalar_names() + [l.iterator for l in loops]
        if self.rng.random() < 0.1:
            names += list(self.ITERATORS)  # iterator read after its loop
        return LvalRead(Var(self.rng.choice(names)))

    def expr(self, loops: list[_Loop], depth: int = 2):
        if depth == 0 or self.rng.random() < 0.45:
            return self.leaf(loops)
        op = self.rng.choice(("+", "-", "*", "+"))
        return BinOp(op, self.expr(loops, depth - 1), self.expr(loops, depth - 1))

    def condition(self, loops: list[_Loop]):
        op = self.rng.choice(("==", "!=", "<", "<=", ">", ">="))
        return BinOp(op, self.expr(loops, 1), self.expr(loops, 1))

    # -- statements -------------------------------------------------------------
    def pick(self, loops: list[_Loop], depth: int) -> str:
        w = dict(self.lim.weights)
        w["invariant"] = 0
        if depth >= self.lim.max_depth or len(loops) >= len(self.ITERATORS) or self.budget < 2:
            w["loop"] = 0
        if depth >= self.lim.max_depth or self.budget < 2:
            w["if"] = 0
        kinds = [k for k in w if w[k] > 0]
        if not kinds:
            return "assign"
        return self.rng.choices(kinds, weights=[w[k] for k in kinds])[0]

    def stmt(self, loops: list[_Loop], depth: int):
        self.budget -= 1
        kind = self.pick(loops, depth)
        if kind == "assign":
            return Assign(Var(self.rng.choice(self.scalar_names())), self.expr(loops))
        if kind == "write":
            arr = self.rng.choice(self.arrays)
            return Assign(self.element(arr, loops), self.expr(loops))
        if kind == "assert":
            return Assert(self.condition(loops))
        if kind == "if":
            then = self.block(loops, depth + 1, self.rng.randint(1, 2))
            orelse = None
            if self.budget > 0 and self.rng.random() < 0.4:
                orelse = self.block(loops, depth + 1, 1)
            return If(self.condition(loops), then, orelse)
        return self.loop(loops, depth)

    def loop(self, loops: list[_Loop], depth: int):
        r = self.rng
        it = next(n for n in self.ITERATORS if n not in {l.iterator for l in loops})
        arr = r.choice(self.arrays)
        shape = r.random()
        if shape < 0.5:
            lo, hi = 0, arr.size - 1  # full access shape
        else:
            lo = r.randint(0, self.lim.max_bound - 1)
            hi = r.randint(lo, self.lim.max_bound - 1)
        info = _Loop(it, lo, hi)
        body = self.block(loops + [info], depth + 1, r.randint(1, 3))
        i = LvalRead(Var(it))
        if shape < 0.85 or lo == hi:
            test = BinOp("<", i, Const(hi + 1)) if r.random() < 0.8 else BinOp("<=", i, Const(hi))
            return For(it, Const(lo), test, BinOp("+", i, Const(1)), body)
        # counting down
        return For(it, Const(hi), BinOp(">=", i, Const(lo)), BinOp("-", i, Const(1)), body)

    def block(self, loops: list[_Loop], depth: int, n: int):
        out = []
        for _ in range(n):
            if self.budget <= 0:
                break
            out.append(self.stmt(loops, depth))
        if not out:
            self.budget -= 1
            out.append(Assign(Var(self.rng.choice(self.scalar_names())), self.const()))
        return seq(out)

    # -- whole-program template -------------------------------------------------
    def invariant(self):
        """Fill an array with a function of the iterator, then assert a
        relation over every element."""
        r = self.rng
        arr = r.choice(self.arrays)
        it = "i"
        full = _Loop(it, 0, arr.size - 1)
        i = LvalRead(Var(it))

        def fexpr():
            c = self.const()
            return r.choice((i, BinOp("+", i, c), BinOp("*", i, c), BinOp("*", i, i), c))

        def target():
            acc = ArrayAccess(arr.name, i)
            if arr.is_record:
                return [Field(acc, f) for f, _ in arr.fields]
            return [acc]

        fill = []
        temp = r.random() < 0.5
        if temp:
            fill.append(Assign(Var("k"), fexpr()))
        values = []
        for t in target():
            v = LvalRead(Var("k")) if temp and r.random() < 0.7 else fexpr()
            values.append(v)
            fill.append(Assign(t, v))
        header = (Const(0), BinOp("<", i, Const(arr.size)), BinOp("+", i, Const(1)))
        first = For(it, *header, seq(fill))
        tgt, val = r.choice(list(zip(target(), values)))
        if temp and val == LvalRead(Var("k")):
            val = fill[0].value
        op = r.choice(("==", "==", "<=", ">=", "!=", "<"))
        rhs = val
        if r.random() < 0.3:
            rhs = BinOp(r.choice(("+", "-")), val, Const(r.randint(0, 1)))
        check = [Assert(BinOp(op, LvalRead(tgt), rhs))]
        if self.budget > 4 and r.random() < 0.3:
            self.budget -= 4
            check.insert(0, self.stmt([full], 1))
        second = For(it, *header, seq(check))
        self.budget -= len(fill) + 3
        middle = [self.stmt([], 0) for _ in range(r.randint(0, 1)) if self.budget > 2]
        return [first] + middle + [second]


def gen_program(limits: GenLimits) -> Program:
    """Deterministic in ``limits`` (including its seed)."""
    g = _Gen(limits)
    decls = g.declarations()
    r = g.rng
    body: list = []
    if limits.weights.get("invariant", 0) > 0 and limits.weights.get("loop", 0) > 0:
        share = limits.weights["invariant"] / sum(limits.weights.values())
        if r.random() < share:
            body.extend(g.invariant())
    while g.budget > 0 and len(body) < limits.max_stmts:
        if body and r.random() < 0.2:
            break
        body.append(g.stmt([], 0))
    while body and _count(body) > limits.max_stmts:
        body.pop()
    if not any(isinstance(s, Assert) for s in _all_stmts(body)):
        if body and _count(body) >= limits.max_stmts:
            body.pop()
        body.append(Assert(g.condition([])))
    return Program(tuple(decls), seq(body))


def _all_stmts(stmts):
    for s in stmts:
        yield from walk_stmt(s)


def _count(stmts) -> int:
    return sum(1 for s in _all_stmts(stmts) if not isinstance(s, Seq))
