"""Witness-index transformation: array-manipulating programs to array-free,
loop-free programs.

Every array ``a`` gets a witness index ``i_a`` chosen once, up front, from
``0..lastof(a)`` and a witness variable ``x_a`` standing for ``a[i_a]``.
Accesses to other elements are dropped (writes) or read as ``nd()``. Each
loop is replaced by a single copy of its body, either bound to the witness
index (when the loop walks the whole array) or guarded by a nondeterministic
choice with the iterator picked from the loop's range.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .analysis import LoopFacts, analyze_loops, array_inventory, iterator_live_after, lastof, loopbound
from .analysis.loops import ArrayInfo
from .ast import (
    ArrayAccess, Assert, Assign, BinOp, Cond, CondAssign, Const, Field, For, If,
    LvalRead, Nd, NdRange, Program, ScalarType, Seq, UnOp, Var, VarDecl,
    all_nodes, int_type, seq,
)
from .frontend.parser import DEFAULT_NAMING, NdNaming


class TransformError(Exception):
    pass


@dataclass(frozen=True)
class WitnessPair:
    array: str
    index_var: str
    value_var: str
    size: int


@dataclass(frozen=True)
class TransformConfig:
    naming: NdNaming = DEFAULT_NAMING
    int_width: int = 32


@dataclass
class TransformReport:
    counts: Counter = field(default_factory=Counter)
    fresh_names: list[str] = field(default_factory=list)
    pairs: list[WitnessPair] = field(default_factory=list)
    loops: list[tuple[int, str]] = field(default_factory=list)  # (loop index, 'S3'|'S4')

    @property
    def s3(self) -> int:
        return self.counts["S3"]

    @property
    def s4(self) -> int:
        return self.counts["S4"]

    def to_dict(self) -> dict:
        return {
            "rules": {k: self.counts.get(k, 0) for k in RULE_NAMES},
            "iterator_exit_assignments": self.counts.get("exit", 0),
            "fresh_names": list(self.fresh_names),
            "witness_pairs": [
                {"array": p.array, "index_var": p.index_var, "value_var": p.value_var, "size": p.size}
                for p in self.pairs
            ],
            "loops": [{"loop": n, "rule": r} for n, r in self.loops],
        }


RULE_NAMES = ("E1", "E2", "E3", "S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8", "S9", "P")


@dataclass
class TransformContext:
    pairs: dict[str, WitnessPair]
    facts: dict[int, LoopFacts]
    live: dict[int, bool]
    arrays: dict[str, ArrayInfo]
    config: TransformConfig
    report: TransformReport
    loop: Optional[LoopFacts] = None


def fresh_name(base: str, taken: set[str]) -> str:
    name, n = base, 1
    while name in taken:
        name = f"{base}{n}"
        n += 1
    taken.add(name)
    return name


def witness_pairs(program: Program) -> list[WitnessPair]:
    taken = {d.name for d in program.declarations}
    pairs = []
    for a in array_inventory(program):
        pairs.append(WitnessPair(a.name, fresh_name(f"i_{a.name}", taken),
                                 fresh_name(f"x_{a.name}", taken), a.size))
    return pairs


def _witness_lval(lv, pair: WitnessPair):
    if isinstance(lv, Field):
        return Field(Var(pair.value_var), lv.field)
    return Var(pair.value_var)


def _split_access(lv) -> Optional[tuple[ArrayAccess, Optional[str]]]:
    if isinstance(lv, ArrayAccess):
        return lv, None
    if isinstance(lv, Field) and isinstance(lv.base, ArrayAccess):
        return lv.base, lv.field
    return None


def transform_expr(expr, ctx: TransformContext):
    """Rules E1-E3."""
    counts = ctx.report.counts
    if isinstance(expr, BinOp):
        counts["E1"] += 1
        return BinOp(expr.op, transform_expr(expr.left, ctx), transform_expr(expr.right, ctx))
    if isinstance(expr, UnOp):
        counts["E1"] += 1
        return UnOp(expr.op, transform_expr(expr.operand, ctx))
    if isinstance(expr, LvalRead):
        split = _split_access(expr.lval)
        if split is not None:
            acc, _ = split
            counts["E2"] += 1
            pair = ctx.pairs[acc.array]
            hit = BinOp("==", transform_expr(acc.index, ctx), LvalRead(Var(pair.index_var)))
            return Cond(hit, LvalRead(_witness_lval(expr.lval, pair)), Nd())
    counts["E3"] += 1
    return expr


def _havoc(defs, ctx: TransformContext) -> list:
    out = []
    for name in sorted(defs.scalars):
        base, _, fld = name.partition(".")
        out.append(Assign(Field(Var(base), fld) if fld else Var(name), Nd()))
    for a in ctx.arrays:
        info, pair = ctx.arrays[a], ctx.pairs[a]
        if info.element == "record":
            out.extend(Assign(Field(Var(pair.value_var), f), Nd())
                       for f, _ in info.fields if f"{a}.{f}" in defs.arrays)
        elif a in defs.arrays:
            out.append(Assign(Var(pair.value_var), Nd()))
    return out


def _loop(s: For, ctx: TransformContext) -> list:
    facts = ctx.facts[id(s)]
    outer, ctx.loop = ctx.loop, facts
    try:
        body = transform_stmt(s.body, ctx)
    finally:
        ctx.loop = outer
    havoc = _havoc(facts.defs, ctx)
    ctx.report.loops.append((facts.index, facts.rule))
    it = Var(s.iterator)
    if facts.anchor is not None:
        ctx.report.counts["S3"] += 1
        anchor = ctx.pairs[facts.anchor]
        out = havoc + [Assign(it, LvalRead(Var(anchor.index_var)))] + [body] + list(havoc)
    else:
        ctx.report.counts["S4"] += 1
        lo, hi = loopbound(facts)
        guarded = seq(havoc + [Assign(it, NdRange(lo, hi))] + [body])
        out = [If(NdRange(0, 1), guarded)] + list(havoc)
    if ctx.live.get(id(s)):
        # the iterator's exit value is observed after the loop
        ctx.report.counts["exit"] += 1
        out.append(Assign(it, Const(facts.exit) if facts.exit is not None else Nd()))
    return out


def transform_stmt(stmt, ctx: TransformContext):
    """Rules S1-S9."""
    counts = ctx.report.counts
    if isinstance(stmt, Assign):
        split = _split_access(stmt.target)
        value = transform_expr(stmt.value, ctx)
        if split is not None:
            acc, _ = split
            counts["S1"] += 1
            pair = ctx.pairs[acc.array]
            hit = BinOp("==", transform_expr(acc.index, ctx), LvalRead(Var(pair.index_var)))
            return CondAssign(hit, _witness_lval(stmt.target, pair), value, value, span=stmt.span)
        counts["S2"] += 1
        return Assign(stmt.target, value, span=stmt.span)
    if isinstance(stmt, For):
        return seq(_loop(stmt, ctx))
    if isinstance(stmt, If):
        cond = transform_expr(stmt.cond, ctx)
        then = transform_stmt(stmt.then, ctx)
        if stmt.orelse is not None:
            counts["S5"] += 1
            return If(cond, then, transform_stmt(stmt.orelse, ctx), span=stmt.span)
        counts["S6"] += 1
        return If(cond, then, span=stmt.span)
    if isinstance(stmt, Seq) and stmt.stmts:
        counts["S7"] += 1
        return seq([transform_stmt(c, ctx) for c in stmt.stmts], span=stmt.span)
    if isinstance(stmt, Assert):
        counts["S8"] += 1
        return Assert(transform_expr(stmt.cond, ctx), span=stmt.span)
    counts["S9"] += 1
    return stmt


def _declarations(program: Program, pairs: dict[str, WitnessPair], width: int) -> tuple[VarDecl, ...]:
    out: list[VarDecl] = []
    for d in program.declarations:
        if not d.is_array:
            out.append(d)
            continue
        p = pairs[d.name]
        out.append(VarDecl(p.value_var, scalar=d.scalar, fields=d.fields, struct_tag=d.struct_tag))
        out.append(VarDecl(p.index_var, scalar=int_type(width)))
    return tuple(out)


def transform_program(program: Program, config: TransformConfig = TransformConfig()
                      ) -> tuple[Program, TransformReport]:
    """Rule P: witness-index initialisation followed by the rewritten body."""
    for node in all_nodes(program):
        if isinstance(node, (Nd, NdRange, Cond, CondAssign)):
            raise TransformError("input already contains transformation-only constructs")
    report = TransformReport()
    pair_list = witness_pairs(program)
    pairs = {p.array: p for p in pair_list}
    report.pairs = pair_list
    report.fresh_names = [n for p in pair_list for n in (p.index_var, p.value_var)]
    ctx = TransformContext(
        pairs=pairs, facts=analyze_loops(program), live=iterator_live_after(program),
        arrays={a.name: a for a in array_inventory(program)}, config=config, report=report,
    )
    init = []
    for a in array_inventory(program):
        report.counts["P"] += 1
        init.append(Assign(Var(pairs[a.name].index_var), NdRange(0, lastof(a), witness=True)))
    body = transform_stmt(program.body, ctx)
    out = Program(_declarations(program, pairs, config.int_width), seq(init + [body]))
    return out, report
