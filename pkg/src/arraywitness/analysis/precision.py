"""Classify assertions by whether the witness transformation is exact for them.

For an assertion inside a loop we compute its dependence cone over the
original program (data dependence through reaching definitions, control
dependence through enclosing ``if`` conditions). The loops holding cone
sites form ``S_def``. Rules l1, a2, a3, s4, d5 and d6 are then evaluated
over the cone.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..ast import Assert, LvalRead, Program, Span, Var
from ..frontend.emit import emit_expr
from .dataflow import ENTRY, Dataflow, Site, analyze_dataflow
from .loops import LoopFacts, analyze_loops, is_iter, scalar_reads

RULES = ("l1", "a2", "a3", "s4", "d5", "d6")


@dataclass
class AssertionPrecision:
    index: int  # pre-order position of the assertion
    span: Optional[Span]
    in_loop: bool
    qualifies: bool
    violated_rules: frozenset = frozenset()
    relaxation_applied: bool = False
    contributing_loops: tuple = ()  # loop indices forming S_def
    assert_loop: Optional[int] = None
    v_imp: frozenset = frozenset()
    e_imp: tuple = ()
    reasons: tuple = ()


@dataclass
class PrecisionReport:
    assertions: list[AssertionPrecision] = field(default_factory=list)

    @property
    def all_qualify(self) -> bool:
        return bool(self.assertions) and all(a.qualifies for a in self.assertions)

    def __iter__(self):
        return iter(self.assertions)

    def __len__(self) -> int:
        return len(self.assertions)


@dataclass
class _Cone:
    sites: set
    uses: list  # (site, location) scalar uses
    reads: list  # (site, ArrayAccess, location) array reads


def dependence_cone(df: Dataflow, start: int) -> _Cone:
    cone = _Cone(set(), [], [])
    work = [start]
    while work:
        sid = work.pop()
        if sid in cone.sites:
            continue
        cone.sites.add(sid)
        site = df.sites[sid]
        pending = list(site.ifs)
        for loc in site.uses:
            cone.uses.append((site, loc))
            pending.extend(d for d in df.defs_of(sid, loc) if d != ENTRY)
        for acc, loc in site.reads:
            cone.reads.append((site, acc, loc))
            pending.extend(d for d in df.defs_of(sid, loc) if d != ENTRY)
        work.extend(p for p in pending if p not in cone.sites)
    return cone


def _site_loops(site: Site) -> tuple:
    # header sites of loop L belong to L as well
    if site.kind == "init":
        return site.loops + (id(site.loop),)
    return site.loops


class _Classifier:
    def __init__(self, program: Program):
        self.program = program
        self.facts = analyze_loops(program)
        self.df = analyze_dataflow(program)

    def fact(self, loop_id) -> LoopFacts:
        return self.facts[loop_id]

    def within(self, site: Site, loop_id) -> bool:
        return loop_id in _site_loops(site)

    def relaxable(self, loc: str, loop_id, cone: _Cone) -> bool:
        """x in loopdefs(L) is harmless when every definition of x in L uses
        only constants and L's iterator, and every cone use of x that L's
        definitions reach sits in L after a definition in the same iteration."""
        f = self.fact(loop_id)
        defs_in_loop = [s for s in self.df.sites.values()
                        if s.defines == loc and not s.weak and self.within(s, loop_id)]
        for d in defs_in_loop:
            if d.kind in ("init", "step"):
                return False
            if d.reads or not scalar_reads(d.rhs) <= {f.iterator}:
                return False
        def_ids = {d.id for d in defs_in_loop}
        for site, used in cone.uses:
            if used != loc:
                continue
            reached = bool(self.df.defs_of(site.id, loc) & def_ids)
            if not reached and not self.within(site, loop_id):
                continue
            if not self.within(site, loop_id) or site.kind == "init":
                return False
            if site.innermost != loop_id and not self._must_through(site, loop_id, loc):
                return False
            if site.innermost == loop_id and loc not in self.df.must_in.get(site.id, frozenset()):
                return False
        return True

    def _must_through(self, site: Site, loop_id, loc: str) -> bool:
        # site is nested deeper than loop_id: x must be defined in L's body
        # before the nested loop that holds the site starts
        nested = site.loops[site.loops.index(loop_id) + 1]
        init_site = self.df.headers[nested][0]
        return loc in self.df.must_in.get(init_site, frozenset())

    def iterator_owner(self, site: Site, loc: str) -> Optional[int]:
        for lid in reversed(_site_loops(site)):
            if self.fact(lid).iterator == loc:
                return lid
        return None

    def classify(self, index: int, site: Site) -> AssertionPrecision:
        node: Assert = site.node
        if not site.loops:
            return AssertionPrecision(index, node.span, in_loop=False, qualifies=False,
                                      reasons=("assertion outside any loop",))
        sa = site.loops[-1]
        enclosing_sa = set(site.loops[:-1])
        cone = dependence_cone(self.df, site.id)
        s_def: set = set()
        for sid in cone.sites:
            if sid == site.id:
                continue
            s = self.df.sites[sid]
            for lid in _site_loops(s):
                if lid == sa:
                    continue
                if lid in enclosing_sa and self.within(s, sa):
                    continue
                s_def.add(lid)
        rule_loops = {sa} | s_def
        checked = rule_loops | enclosing_sa
        violated: set = set()
        reasons: list = []
        relaxed = False

        for lid in sorted(rule_loops, key=lambda l: self.fact(l).index):
            f = self.fact(lid)
            if f.anchor is None:
                violated.add("l1")
                reasons.append(f"l1: loop L{f.index} does not access an array completely")

        for s, acc, _loc in cone.reads:
            inner = s.innermost
            if inner is None:
                violated.add("a2")
                reasons.append(f"a2: {acc.array}[...] read outside loops")
                continue
            f = self.fact(inner)
            rule = "a2" if inner == sa else "d5"
            if not is_iter(acc.index, f.iterator):
                violated.add(rule)
                reasons.append(f"{rule}: index of {acc.array} is not the iterator of L{f.index}")
            elif f.anchor is not None and f.anchor != acc.array:
                violated.add("l1")
                reasons.append(f"l1: L{f.index} is anchored to {f.anchor}, not {acc.array}")

        # 'a[]' -> 'a', 'a[].f' -> 'a.f', matching the loopdefs spelling
        cone_arrays = {loc.replace("[]", "") for _s, _acc, loc in cone.reads}
        for lid in checked:
            f = self.fact(lid)
            for a in sorted(cone_arrays & f.defs.arrays):
                violated.add("a3")
                reasons.append(f"a3: {a} in loopdefs(L{f.index})")

        tolerated: dict = {}

        def harmless(loc: str, lid) -> bool:
            key = (loc, lid)
            if key not in tolerated:
                tolerated[key] = self.relaxable(loc, lid, cone)
            return tolerated[key]

        v_imp = set()
        for s, loc in cone.uses:
            v_imp.add(loc)
            owner = self.iterator_owner(s, loc)
            if owner is not None:
                continue
            for d in self.df.defs_of(s.id, loc):
                if d == ENTRY:
                    continue
                ds = self.df.sites[d]
                if ds.kind in ("init", "step") and not self.within(s, id(ds.loop)):
                    if self.fact(id(ds.loop)).exit is None:
                        violated.add("s4")
                        reasons.append(f"s4: iterator {loc} read after its loop")
            for lid in checked:
                f = self.fact(lid)
                if loc in f.defs.scalars:
                    if harmless(loc, lid):
                        relaxed = True
                    else:
                        violated.add("s4")
                        reasons.append(f"s4: {loc} in loopdefs(L{f.index})")

        for sid in cone.sites:
            s = self.df.sites[sid]
            if s.write is None or s.innermost is None or s.innermost not in s_def:
                continue
            rhs = s.rhs
            if isinstance(rhs, LvalRead) and isinstance(rhs.lval, Var):
                f = self.fact(s.innermost)
                loc = rhs.lval.name
                if loc in f.defs.scalars and not harmless(loc, s.innermost):
                    violated.add("d6")
                    reasons.append(f"d6: {loc} in loopdefs(L{f.index})")

        e_imp = tuple(sorted({emit_expr(LvalRead(acc)) for _s, acc, _l in cone.reads}))
        return AssertionPrecision(
            index=index, span=node.span, in_loop=True, qualifies=not violated,
            violated_rules=frozenset(violated), relaxation_applied=relaxed,
            contributing_loops=tuple(sorted(self.fact(l).index for l in s_def)),
            assert_loop=self.fact(sa).index, v_imp=frozenset(v_imp), e_imp=e_imp,
            reasons=tuple(dict.fromkeys(reasons)),
        )


def classify_precision(program: Program) -> PrecisionReport:
    c = _Classifier(program)
    report = PrecisionReport()
    asserts = [s for s in c.df.sites.values() if s.kind == "assert"]
    for n, site in enumerate(asserts, start=1):
        report.assertions.append(c.classify(n, site))
    return report
