"""Per-loop facts consumed by the transformation: lastof, loopdefs,
fullarrayaccess, loop bounds and the array a loop is anchored to."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..ast import (
    ArrayAccess, Assign, BinOp, CondAssign, Const, Field, For, If, LvalRead,
    Program, ScalarType, Seq, Span, Var, VarDecl, lval_array, stmt_exprs,
    walk_expr, walk_stmt,
)


@dataclass(frozen=True)
class ArrayInfo:
    name: str
    size: int
    element: str  # 'scalar' | 'record'
    fields: tuple[tuple[str, ScalarType], ...] = ()
    scalar: Optional[ScalarType] = None
    span: Optional[Span] = field(default=None, compare=False)
    struct_tag: Optional[str] = None

    @classmethod
    def from_decl(cls, d: VarDecl) -> "ArrayInfo":
        return cls(d.name, d.size, "record" if d.is_record else "scalar", d.fields,
                   d.scalar, d.span, d.struct_tag)


def array_inventory(program: Program) -> list[ArrayInfo]:
    return [ArrayInfo.from_decl(d) for d in program.declarations if d.is_array]


def lastof(array: ArrayInfo) -> int:
    return array.size - 1


def loc_name(lv) -> str:
    """Location key for dataflow: ``x``, ``x.f``, ``a[]`` or ``a[].f``."""
    if isinstance(lv, Var):
        return lv.name
    if isinstance(lv, ArrayAccess):
        return f"{lv.array}[]"
    if isinstance(lv, Field):
        return f"{loc_name(lv.base)}.{lv.field}"
    raise TypeError(lv)


def scalar_reads(e) -> set[str]:
    """Non-array locations read by an expression (including index expressions)."""
    out = set()
    for n in walk_expr(e):
        if isinstance(n, LvalRead) and lval_array(n.lval) is None:
            out.add(loc_name(n.lval))
    return out


def array_reads(e) -> list[tuple[ArrayAccess, str]]:
    """Array element reads as (access, location key)."""
    out = []
    for n in walk_expr(e):
        if isinstance(n, LvalRead):
            acc = lval_array(n.lval)
            if acc is not None:
                out.append((acc, loc_name(n.lval)))
    return out


def is_iter(e, iterator: str) -> bool:
    return e == LvalRead(Var(iterator))


def _is_const_rhs(e) -> bool:
    return isinstance(e, Const)


def array_part(lv) -> str:
    """``a`` for an element write, ``a.f`` for a field of an element."""
    if isinstance(lv, Field):
        return f"{lval_array(lv).array}.{lv.field}"
    return lval_array(lv).array


@dataclass(frozen=True)
class ModSet:
    scalars: frozenset = frozenset()
    arrays: frozenset = frozenset()  # 'a' or, for records, 'a.f' per written field

    def __contains__(self, name: str) -> bool:
        return name in self.scalars or name in self.arrays or name in self.array_names

    @property
    def array_names(self) -> frozenset:
        return frozenset(n.split(".", 1)[0] for n in self.arrays)


def _assignments(body) -> list[tuple[object, object]]:
    """(target lvalue, rhs) pairs in a loop body, nested loop headers included."""
    out = []
    for s in walk_stmt(body):
        if isinstance(s, Assign):
            out.append((s.target, s.value))
        elif isinstance(s, CondAssign):
            out.append((s.target, s.value))
        elif isinstance(s, For):
            out.append((Var(s.iterator), s.init))
            out.append((Var(s.iterator), s.step))
    return out


def upward_exposed(body) -> set[str]:
    """Locations that may be read in an iteration before being written in it."""
    exposed: set[str] = set()

    def uses(e, defined):
        exposed.update(scalar_reads(e) - defined)

    def run(s, defined: frozenset) -> frozenset:
        if isinstance(s, Seq):
            for c in s.stmts:
                defined = run(c, defined)
            return defined
        if isinstance(s, (Assign, CondAssign)):
            for e in stmt_exprs(s):
                if e is not s.target:
                    uses(e, defined)
            acc = lval_array(s.target)
            if acc is not None:
                uses(acc.index, defined)
                return defined
            if isinstance(s, CondAssign):
                return defined
            return defined | {loc_name(s.target)}
        if isinstance(s, If):
            uses(s.cond, defined)
            a = run(s.then, defined)
            b = run(s.orelse, defined) if s.orelse is not None else defined
            return a & b
        if isinstance(s, For):
            uses(s.init, defined)
            inner = defined | {s.iterator}
            uses(s.test, inner)
            uses(s.step, inner)
            run(s.body, inner)
            return inner
        for e in stmt_exprs(s):
            uses(e, defined)
        return defined

    run(body, frozenset())
    return exposed


def loopdefs(loop: For) -> ModSet:
    """Over-approximate set of locations a loop body modifies.

    Scalars assigned only literal constants are left out, unless they can be
    read in an iteration before that iteration assigns them (otherwise the
    value carried from the previous iteration would be lost). The loop's own
    iterator is never included. An array is included when some write to it
    uses an index other than the iterator itself; for arrays of records only
    the fields so written are included.
    """
    scalars: dict[str, bool] = {}
    arrays: set[str] = set()
    for target, rhs in _assignments(loop.body):
        acc = lval_array(target)
        if acc is not None:
            if not is_iter(acc.index, loop.iterator):
                arrays.add(array_part(target))
            continue
        name = loc_name(target)
        scalars[name] = scalars.get(name, True) and _is_const_rhs(rhs)
    exposed = upward_exposed(loop.body) if any(scalars.values()) else set()
    kept = {n for n, const_only in scalars.items() if not const_only or n in exposed}
    kept.discard(loop.iterator)
    return ModSet(frozenset(kept), frozenset(arrays))


def assigns_iterator(loop: For) -> bool:
    return any(loc_name(t) == loop.iterator for t, _ in _assignments(loop.body))


def _is_unit_step(loop: For, op: str) -> bool:
    s = loop.step
    if not isinstance(s, BinOp) or s.op != op:
        return False
    if s.left == LvalRead(Var(loop.iterator)) and s.right == Const(1):
        return True
    return op == "+" and s.right == LvalRead(Var(loop.iterator)) and s.left == Const(1)


def _step_const(loop: For) -> Optional[int]:
    """Constant increment of the step expression, if it has that shape."""
    s = loop.step
    it = LvalRead(Var(loop.iterator))
    if isinstance(s, BinOp) and isinstance(s.right, Const) and s.left == it:
        if s.op == "+":
            return s.right.value
        if s.op == "-":
            return -s.right.value
    if isinstance(s, BinOp) and s.op == "+" and isinstance(s.left, Const) and s.right == it:
        return s.left.value
    return None


def array_accesses(body, array: str) -> list[ArrayAccess]:
    out = []
    for s in walk_stmt(body):
        for e in stmt_exprs(s):
            for n in walk_expr(e):
                if isinstance(n, ArrayAccess) and n.array == array:
                    out.append(n)
    return out


def fullarrayaccess(loop: For, array: ArrayInfo) -> bool:
    """True only for ``for (i = 0; i < size; i++)`` loops that touch the
    array solely through ``a[i]`` and never write the iterator."""
    if loop.init != Const(0) or not _is_unit_step(loop, "+"):
        return False
    it = LvalRead(Var(loop.iterator))
    t = loop.test
    if t not in (BinOp("<", it, Const(array.size)), BinOp("<=", it, Const(array.size - 1))):
        return False
    if assigns_iterator(loop):
        return False
    accesses = array_accesses(loop.body, array.name)
    return bool(accesses) and all(is_iter(a.index, loop.iterator) for a in accesses)


def _test_bound(loop: For) -> Optional[tuple[str, int]]:
    """Normalise the test to ``i OP c``; returns (OP, c)."""
    t = loop.test
    it = LvalRead(Var(loop.iterator))
    flip = {"<": ">", "<=": ">=", ">": "<", ">=": "<="}
    if isinstance(t, BinOp) and t.op in flip:
        if t.left == it and isinstance(t.right, Const):
            return t.op, t.right.value
        if t.right == it and isinstance(t.left, Const):
            return flip[t.op], t.left.value
    return None


def static_range(loop: For) -> Optional[tuple[int, int]]:
    """Iterator values the body can observe, when statically evident."""
    if not isinstance(loop.init, Const) or assigns_iterator(loop):
        return None
    step = _step_const(loop)
    bound = _test_bound(loop)
    if step is None or bound is None or step == 0:
        return None
    op, c = bound
    start = loop.init.value
    if step > 0 and op in ("<", "<="):
        hi = c - 1 if op == "<" else c
        return (start, hi) if start <= hi else None
    if step < 0 and op in (">", ">="):
        lo = c + 1 if op == ">" else c
        return (lo, start) if lo <= start else None
    return None


def exit_value(loop: For) -> Optional[int]:
    """Iterator value after the loop, for unit-step loops with constant bounds."""
    if not isinstance(loop.init, Const) or assigns_iterator(loop):
        return None
    bound = _test_bound(loop)
    if bound is None:
        return None
    op, c = bound
    start = loop.init.value
    if _is_unit_step(loop, "+") and op in ("<", "<="):
        hi = c - 1 if op == "<" else c
        return hi + 1 if start <= hi else start
    if _is_unit_step(loop, "-") and op in (">", ">="):
        lo = c + 1 if op == ">" else c
        return lo - 1 if lo <= start else start
    return None


@dataclass
class LoopFacts:
    index: int
    loop: For = field(repr=False)
    iterator: str
    lower: Optional[int]
    upper: Optional[int]
    full_access: dict[str, bool]
    defs: ModSet
    anchor: Optional[str] = None
    parent: Optional[int] = None
    iterator_type: Optional[ScalarType] = None
    exit: Optional[int] = None

    @property
    def span(self) -> Optional[Span]:
        return self.loop.span

    @property
    def rule(self) -> str:
        return "S3" if self.anchor is not None else "S4"


def loopbound(facts: LoopFacts) -> tuple[int, int]:
    """Iterator range for the nondeterministic choice of rule S4."""
    if facts.lower is not None and facts.upper is not None:
        return facts.lower, facts.upper
    ty = facts.iterator_type
    return ty.min, ty.max


def loops_of(program: Program) -> list[For]:
    return [s for s in walk_stmt(program.body) if isinstance(s, For)]


def analyze_loops(program: Program) -> dict[int, LoopFacts]:
    """Facts for every loop, keyed by ``id()`` of the For node.

    A loop is anchored (rule S3) to the first array in declaration order
    that it fully accesses, unless an enclosing anchored loop already uses
    that array's witness index. Arrays other than the anchor written in an
    anchored loop join its ``defs``.
    """
    arrays = array_inventory(program)
    decls = {d.name: d for d in program.declarations}
    facts: dict[int, LoopFacts] = {}
    counter = [0]

    def visit(s, parent: Optional[LoopFacts], taken: frozenset) -> None:
        if isinstance(s, Seq):
            for c in s.stmts:
                visit(c, parent, taken)
        elif isinstance(s, If):
            visit(s.then, parent, taken)
            if s.orelse is not None:
                visit(s.orelse, parent, taken)
        elif isinstance(s, For):
            counter[0] += 1
            full = {a.name: fullarrayaccess(s, a) for a in arrays}
            anchor = next((a.name for a in arrays if full[a.name] and a.name not in taken), None)
            rng = static_range(s)
            defs = loopdefs(s)
            if anchor is not None:
                # the body runs only at i = i_anchor, so writes to any other
                # array miss every element its own witness might be tracking
                other = {array_part(t) for t, _ in _assignments(s.body)
                         if lval_array(t) is not None and lval_array(t).array != anchor}
                defs = ModSet(defs.scalars, defs.arrays | other)
            f = LoopFacts(
                index=counter[0], loop=s, iterator=s.iterator,
                lower=rng[0] if rng else None, upper=rng[1] if rng else None,
                full_access=full, defs=defs, anchor=anchor,
                parent=parent.index if parent else None,
                iterator_type=decls[s.iterator].scalar, exit=exit_value(s),
            )
            facts[id(s)] = f
            visit(s.body, f, taken | {anchor} if anchor else taken)

    visit(program.body, None, frozenset())
    return facts
