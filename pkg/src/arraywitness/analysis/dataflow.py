"""Reaching definitions, must-definition and liveness over the structured AST.

Every assignment, assertion, ``if`` condition and loop header component is a
*site*. Array element writes are weak definitions of the whole array
location (``a[]`` or ``a[].f``); everything else is a strong definition.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..ast import (
    ArrayAccess, Assert, Assign, For, If, LvalRead, Program, Seq, Var,
    lval_array, stmt_exprs,
)
from .loops import array_reads, loc_name, scalar_reads

ENTRY = 0  # pseudo-definition: the initial value of a location


@dataclass
class Site:
    id: int
    kind: str  # 'assign' | 'assert' | 'if' | 'init' | 'test' | 'step'
    node: object = field(repr=False)
    loops: tuple  # ids of enclosing For nodes, outermost first
    ifs: tuple  # enclosing 'if' site ids, outermost first
    defines: Optional[str] = None
    weak: bool = False
    uses: frozenset = frozenset()
    reads: tuple = ()  # (ArrayAccess, location key) array reads
    rhs: object = field(default=None, repr=False)
    write: Optional[ArrayAccess] = field(default=None, repr=False)
    loop: Optional[object] = field(default=None, repr=False)  # For node for header sites

    @property
    def innermost(self) -> Optional[int]:
        return self.loops[-1] if self.loops else None


@dataclass
class Dataflow:
    sites: dict[int, Site]
    rd_in: dict[int, dict[str, frozenset]]
    must_in: dict[int, frozenset]  # locations definitely written earlier in the innermost iteration
    by_node: dict[int, int]  # id(stmt) -> site id for Assign/Assert/If
    headers: dict[int, tuple[int, int, int]]  # id(For) -> (init, test, step) site ids
    live_after: dict[int, frozenset]  # id(For) -> locations live after the loop

    def defs_of(self, site_id: int, loc: str) -> frozenset:
        return self.rd_in[site_id].get(loc, frozenset({ENTRY}))


def _join(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, frozenset({ENTRY})) | v
    for k in a.keys() - b.keys():
        out[k] = a[k] | frozenset({ENTRY})
    return out


class _Builder:
    def __init__(self):
        self.sites: dict[int, Site] = {}
        self.by_node: dict[int, int] = {}
        self.headers: dict[int, tuple[int, int, int]] = {}
        self.rd_in: dict[int, dict[str, frozenset]] = {}
        self.must_in: dict[int, frozenset] = {}
        self.live_after: dict[int, frozenset] = {}

    def new(self, **kw) -> Site:
        sid = len(self.sites) + 1
        s = Site(id=sid, **kw)
        self.sites[sid] = s
        return s

    # site construction -------------------------------------------------
    def collect(self, s, loops: tuple, ifs: tuple) -> None:
        if isinstance(s, Seq):
            for c in s.stmts:
                self.collect(c, loops, ifs)
        elif isinstance(s, Assign):
            acc = lval_array(s.target)
            uses = scalar_reads(s.value)
            reads = list(array_reads(s.value))
            if acc is not None:
                uses |= scalar_reads(acc.index)
                reads += array_reads(acc.index)
            site = self.new(kind="assign", node=s, loops=loops, ifs=ifs,
                            defines=loc_name(s.target), weak=acc is not None,
                            uses=frozenset(uses), reads=tuple(reads), rhs=s.value, write=acc)
            self.by_node[id(s)] = site.id
        elif isinstance(s, Assert):
            site = self.new(kind="assert", node=s, loops=loops, ifs=ifs,
                            uses=frozenset(scalar_reads(s.cond)), reads=tuple(array_reads(s.cond)))
            self.by_node[id(s)] = site.id
        elif isinstance(s, If):
            site = self.new(kind="if", node=s, loops=loops, ifs=ifs,
                            uses=frozenset(scalar_reads(s.cond)), reads=tuple(array_reads(s.cond)))
            self.by_node[id(s)] = site.id
            self.collect(s.then, loops, ifs + (site.id,))
            if s.orelse is not None:
                self.collect(s.orelse, loops, ifs + (site.id,))
        elif isinstance(s, For):
            init = self.new(kind="init", node=s, loops=loops, ifs=ifs, defines=s.iterator,
                            uses=frozenset(scalar_reads(s.init)), reads=tuple(array_reads(s.init)),
                            rhs=s.init, loop=s)
            inner = loops + (id(s),)
            test = self.new(kind="test", node=s, loops=inner, ifs=ifs,
                            uses=frozenset(scalar_reads(s.test)), reads=tuple(array_reads(s.test)),
                            loop=s)
            self.collect(s.body, inner, ifs)
            step = self.new(kind="step", node=s, loops=inner, ifs=ifs, defines=s.iterator,
                            uses=frozenset(scalar_reads(s.step)), reads=tuple(array_reads(s.step)),
                            rhs=s.step, loop=s)
            self.headers[id(s)] = (init.id, test.id, step.id)

    # reaching definitions ----------------------------------------------
    def _def(self, site: Site, state: dict) -> dict:
        state = dict(state)
        if site.weak:
            state[site.defines] = state.get(site.defines, frozenset({ENTRY})) | {site.id}
        else:
            state[site.defines] = frozenset({site.id})
        return state

    def rd(self, s, state: dict) -> dict:
        if isinstance(s, Seq):
            for c in s.stmts:
                state = self.rd(c, state)
            return state
        if isinstance(s, Assign):
            sid = self.by_node[id(s)]
            self.rd_in[sid] = state
            return self._def(self.sites[sid], state)
        if isinstance(s, Assert):
            self.rd_in[self.by_node[id(s)]] = state
            return state
        if isinstance(s, If):
            self.rd_in[self.by_node[id(s)]] = state
            a = self.rd(s.then, state)
            b = self.rd(s.orelse, state) if s.orelse is not None else state
            return _join(a, b)
        if isinstance(s, For):
            init, test, step = (self.sites[i] for i in self.headers[id(s)])
            self.rd_in[init.id] = state
            head = self._def(init, state)
            while True:
                self.rd_in[test.id] = head
                out = self.rd(s.body, head)
                self.rd_in[step.id] = out
                new_head = _join(head, self._def(step, out))
                if new_head == head:
                    return head
                head = new_head
        return state

    # must-definitions within the innermost loop iteration ----------------
    def must(self, s, defined: frozenset) -> frozenset:
        if isinstance(s, Seq):
            for c in s.stmts:
                defined = self.must(c, defined)
            return defined
        if isinstance(s, Assign):
            sid = self.by_node[id(s)]
            self.must_in[sid] = defined
            site = self.sites[sid]
            return defined if site.weak else defined | {site.defines}
        if isinstance(s, Assert):
            self.must_in[self.by_node[id(s)]] = defined
            return defined
        if isinstance(s, If):
            self.must_in[self.by_node[id(s)]] = defined
            a = self.must(s.then, defined)
            b = self.must(s.orelse, defined) if s.orelse is not None else defined
            return a & b
        if isinstance(s, For):
            init, test, step = self.headers[id(s)]
            self.must_in[init] = defined
            self.must_in[test] = frozenset({s.iterator})
            out = self.must(s.body, frozenset({s.iterator}))
            self.must_in[step] = out
            return defined | {s.iterator}
        return defined

    # liveness of non-array locations -------------------------------------
    def live(self, s, after: frozenset) -> frozenset:
        if isinstance(s, Seq):
            for c in reversed(s.stmts):
                after = self.live(c, after)
            return after
        if isinstance(s, Assign):
            site = self.sites[self.by_node[id(s)]]
            out = after if site.weak else after - {site.defines}
            return out | site.uses
        if isinstance(s, (Assert, If)):
            site = self.sites[self.by_node[id(s)]]
            if isinstance(s, If):
                a = self.live(s.then, after)
                b = self.live(s.orelse, after) if s.orelse is not None else after
                after = a | b
            return after | site.uses
        if isinstance(s, For):
            init, test, step = (self.sites[i] for i in self.headers[id(s)])
            self.live_after[id(s)] = after
            head = after | test.uses
            while True:
                body_in = self.live(s.body, (head - {s.iterator}) | step.uses)
                new_head = head | body_in | test.uses
                if new_head == head:
                    break
                head = new_head
            return (head - {s.iterator}) | init.uses
        return after


def analyze_dataflow(program: Program) -> Dataflow:
    b = _Builder()
    b.collect(program.body, (), ())
    b.rd(program.body, {})
    b.must(program.body, frozenset())
    b.live(program.body, frozenset())
    return Dataflow(b.sites, b.rd_in, b.must_in, b.by_node, b.headers, b.live_after)


def iterator_live_after(program: Program) -> dict[int, bool]:
    """For each loop (keyed by ``id``), whether its iterator is read after
    the loop before being redefined."""
    df = analyze_dataflow(program)
    out = {}
    for s in df.headers:
        out[s] = None
    for sid, site in df.sites.items():
        if site.kind == "init":
            out[id(site.loop)] = site.loop.iterator in df.live_after[id(site.loop)]
    return out
