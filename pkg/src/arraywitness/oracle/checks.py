"""Differential checks between an original program and its transformation.

The original is run deterministically (uninitialised array cells take a
default value, scalars start at zero). The transformed program is executed
once per sequence of nondeterministic choices drawn from an
:class:`NdPolicy`, with each witness variable starting at the same default.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from ..analysis import analyze_loops, classify_precision
from ..ast import Assert, For, If, Program, Seq, walk_stmt
from ..frontend import emit
from ..transform import TransformConfig, WitnessPair, transform_program
from .interp import Chooser, Compiled, FixedChooser, Havoc, Outcome
from .policy import NdPolicy, program_constants

DEFAULT_FUEL = 1_000_000
DEFAULT_MAX_EXECS = 100_000


@dataclass
class Enumeration:
    outcomes: Counter = field(default_factory=Counter)  # Outcome.key -> executions
    examples: dict = field(default_factory=dict)  # Outcome.key -> first Outcome seen
    executions: int = 0
    complete: bool = False  # every choice sequence was visited
    stopped: bool = False  # the stop predicate ended the walk early

    @property
    def inconclusive(self) -> bool:
        return not (self.complete or self.stopped)

    def fails(self, ordinal: int) -> bool:
        return any(ordinal in failed for (_st, failed) in self.outcomes)

    def any_failure(self) -> Optional[Outcome]:
        for key, o in self.examples.items():
            if key[1]:
                return o
        return None


def run_original(program: Program, *, fuel: int = DEFAULT_FUEL, array_default: int = 0,
                 tracing: bool = False, width: int = 32,
                 compiled: Optional[Compiled] = None) -> Outcome:
    """Deterministic run. ``fuel`` bounds the total number of loop iterations."""
    c = compiled or Compiled(program, width)
    return c.execute(FixedChooser(()), NdPolicy(), fuel=fuel, array_default=array_default,
                     tracing=tracing)


def witness_initial(program: Program, pairs, default: int) -> dict:
    """Starting values of the witness variables: the element default."""
    init = {}
    for p in pairs:
        d = program.decl(p.value_var)
        if d is None:
            continue
        if d.is_record:
            for f, ty in d.fields:
                init[f"{p.value_var}.{f}"] = ty.wrap(default)
        else:
            init[p.value_var] = d.scalar.wrap(default)
    return init


def enumerate_transformed(program: Program, policy: NdPolicy, *, fuel: int = DEFAULT_FUEL,
                          max_execs: int = DEFAULT_MAX_EXECS, x_default: int = 0,
                          witness=(), stop: Optional[Callable[[Outcome], bool]] = None,
                          tracing: bool = False, width: int = 32,
                          compiled: Optional[Compiled] = None,
                          on_outcome: Optional[Callable[[Outcome], None]] = None,
                          horizon: Optional[int] = None) -> Enumeration:
    """Execute ``program`` under every choice sequence the policy allows.

    Stops early when ``stop`` returns true for an outcome, and gives up
    (``complete`` stays false) after ``max_execs`` executions. With
    ``horizon`` set, each execution ends once no assertion with an ordinal up
    to ``horizon`` can still run, so later choices are never enumerated.
    """
    c = compiled or Compiled(program, width)
    initial = witness_initial(program, witness, x_default)
    chooser = Chooser()
    result = Enumeration()
    while True:
        if result.executions >= max_execs:
            return result
        o = c.execute(chooser, policy, fuel=fuel, array_default=x_default,
                      initial=initial, tracing=tracing, horizon=horizon)
        result.executions += 1
        result.outcomes[o.key] += 1
        result.examples.setdefault(o.key, o)
        if on_outcome is not None:
            on_outcome(o)
        if stop is not None and stop(o):
            result.stopped = True
            return result
        if not chooser.advance():
            result.complete = True
            return result


@dataclass
class Counterexample:
    program: str  # emitted original program
    array_default: int
    original: Outcome
    choices: Optional[tuple]  # nd sequence for the transformed program, if one exists
    transformed: tuple = ()  # distinct (status, failed) outcome keys observed
    policy_values: tuple = ()
    cap: int = 64
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "program": self.program,
            "array_default": self.array_default,
            "original": {"status": self.original.status, "failed": list(self.original.failed)},
            "choices": list(self.choices) if self.choices is not None else None,
            "transformed_outcomes": [{"status": s, "failed": list(f)} for s, f in self.transformed],
            "policy": {"values": list(self.policy_values), "cap": self.cap},
            "detail": self.detail,
        }


@dataclass
class DiffVerdict:
    property: str  # 'soundness' | 'precision' | 'represents'
    status: str  # 'holds' | 'violated' | 'inconclusive' | 'out-of-class'
    executions: int = 0
    counterexample: Optional[Counterexample] = None
    detail: str = ""

    @property
    def holds(self) -> Optional[bool]:
        if self.status == "holds":
            return True
        if self.status == "violated":
            return False
        return None

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "status": self.status,
            "holds": self.holds,
            "executions": self.executions,
            "detail": self.detail,
            "counterexample": self.counterexample.to_dict() if self.counterexample else None,
        }


@dataclass
class _Setup:
    original: Program
    transformed: Program
    pairs: list
    orig_c: Compiled
    trans_c: Compiled
    width: int


def _setup(original: Program, width: int) -> _Setup:
    transformed, report = transform_program(original, TransformConfig(int_width=width))
    return _Setup(original, transformed, report.pairs, Compiled(original, width),
                  Compiled(transformed, width), width)


def _policy_for(base: Optional[NdPolicy], original: Program, run: Outcome, default: int) -> NdPolicy:
    base = base or NdPolicy()
    return base.widened(program_constants(original) | set(run.observed) | {0, 1, default})


def check_soundness(original: Program, policy: Optional[NdPolicy] = None, *,
                    defaults=(0, 1), fuel: int = DEFAULT_FUEL,
                    max_execs: int = DEFAULT_MAX_EXECS, width: int = 32) -> DiffVerdict:
    """Every assertion the original violates must be violated on some
    transformed execution."""
    s = _setup(original, width)
    total = 0
    for d in defaults:
        orig = run_original(original, fuel=fuel, array_default=d, compiled=s.orig_c)
        if orig.status in ("error", "inconclusive"):
            return DiffVerdict("soundness", "inconclusive", total,
                               detail=f"original run {orig.status}: {orig.detail}")
        if orig.status == "pass":
            continue
        targets = set(orig.failed)
        seen: set = set()

        def stop(o: Outcome) -> bool:
            seen.update(targets & set(o.failed))
            return seen == targets

        pol = _policy_for(policy, original, orig, d)
        # a failing path only has to exist, so a cheap pass over a narrow
        # domain usually finds it before the full enumeration is needed
        stages = [replace(pol, values=frozenset({0, 1, d}), _cache={}), pol]
        en = None
        for stage in stages:
            budget = max_execs - total if stage is pol else min(max_execs // 10, max_execs - total)
            en = enumerate_transformed(s.transformed, stage, fuel=fuel, max_execs=budget,
                                       x_default=d, witness=s.pairs, stop=stop,
                                       compiled=s.trans_c, width=width,
                                       horizon=max(targets - seen))
            total += en.executions
            if seen == targets:
                break
        if seen == targets:
            continue
        if not en.complete:
            return DiffVerdict("soundness", "inconclusive", total,
                               detail=f"execution cap {max_execs} reached")
        cx = Counterexample(emit(original), d, orig, None, tuple(en.outcomes),
                            tuple(sorted(pol.values)), pol.cap,
                            detail=f"assertions {sorted(targets - seen)} never fail after transformation")
        return DiffVerdict("soundness", "violated", total, cx, cx.detail)
    return DiffVerdict("soundness", "holds", total)


def check_precision_empirical(original: Program, policy: Optional[NdPolicy] = None, *,
                              defaults=(0, 1), fuel: int = DEFAULT_FUEL,
                              max_execs: int = DEFAULT_MAX_EXECS, width: int = 32,
                              require_class: bool = True) -> DiffVerdict:
    """For a safe original whose assertions all qualify, no transformed
    execution may fail an assertion."""
    if require_class:
        report = classify_precision(original)
        if not report.all_qualify:
            return DiffVerdict("precision", "out-of-class",
                               detail="not every assertion qualifies for precision")
    s = _setup(original, width)
    total, checked = 0, 0
    for d in defaults:
        orig = run_original(original, fuel=fuel, array_default=d, compiled=s.orig_c)
        if orig.status in ("error", "inconclusive"):
            return DiffVerdict("precision", "inconclusive", total,
                               detail=f"original run {orig.status}: {orig.detail}")
        if orig.status == "fail":
            continue
        checked += 1
        pol = _policy_for(policy, original, orig, d)
        en = enumerate_transformed(s.transformed, pol, fuel=fuel, max_execs=max_execs,
                                   x_default=d, witness=s.pairs, stop=lambda o: bool(o.failed),
                                   compiled=s.trans_c, width=width,
                                   horizon=len(s.trans_c.ordinals))
        total += en.executions
        bad = en.any_failure()
        if bad is not None:
            cx = Counterexample(emit(original), d, orig, bad.choices, tuple(en.outcomes),
                                tuple(sorted(pol.values)), pol.cap,
                                detail=f"transformed execution fails assertion {bad.first}")
            return DiffVerdict("precision", "violated", total, cx, cx.detail)
        if not en.complete:
            return DiffVerdict("precision", "inconclusive", total,
                               detail=f"execution cap {max_execs} reached")
    if not checked:
        return DiffVerdict("precision", "out-of-class", total, detail="original is not safe")
    return DiffVerdict("precision", "holds", total)


# -- represents ------------------------------------------------------------

def _s3_constraints(original: Program) -> dict[int, list[tuple[str, str]]]:
    """For each assertion ordinal, the (array, iterator) pairs of enclosing
    loops bound to a witness index."""
    facts = analyze_loops(original)
    ordinals = {id(a): n for n, a in enumerate(
        (s for s in walk_stmt(original.body) if isinstance(s, Assert)), start=1)}
    out: dict[int, list] = {n: [] for n in ordinals.values()}

    def visit(s, bound: tuple) -> None:
        if isinstance(s, Seq):
            for c in s.stmts:
                visit(c, bound)
        elif isinstance(s, If):
            visit(s.then, bound)
            if s.orelse is not None:
                visit(s.orelse, bound)
        elif isinstance(s, For):
            f = facts[id(s)]
            visit(s.body, bound + ((f.anchor, f.iterator),) if f.anchor else bound)
        elif isinstance(s, Assert):
            out[ordinals[id(s)]] = list(bound)

    visit(original.body, ())
    return out


def _exempt_locations(original: Program) -> set[str]:
    out: set[str] = set()
    for f in analyze_loops(original).values():
        out |= set(f.defs.scalars)
        out.add(f.iterator)
    return out


def _scalar_locations(program: Program) -> list[tuple[str, object]]:
    locs = []
    for d in program.declarations:
        if d.is_array:
            continue
        if d.is_record:
            locs.extend((f"{d.name}.{f}", ty) for f, ty in d.fields)
        else:
            locs.append((d.name, d.scalar))
    return locs


def _matches(wanted: list[tuple[object, int]], memo: dict, policy: NdPolicy) -> bool:
    """``wanted`` pairs a transformed value (possibly an unresolved havoc)
    with the original value it must equal."""
    free: dict[int, list] = {}
    for tv, ov in wanted:
        if isinstance(tv, Havoc):
            if tv.uid in memo:
                v = memo[tv.uid]
                for ty in tv.conv:
                    v = ty.wrap(v)
                if v != ov:
                    return False
            else:
                free.setdefault(tv.uid, []).append((tv, ov))
        elif tv != ov:
            return False
    for items in free.values():
        base = items[0][0].base

        def ok(v):
            for h, ov in items:
                x = v
                for ty in h.conv:
                    x = ty.wrap(x)
                if x != ov:
                    return False
            return True

        if not any(ok(v) for v in policy.domain(base)):
            return False
    return True


def check_represents(original: Program, policy: Optional[NdPolicy] = None, *,
                     mode: str = "exempt", defaults=(0,), fuel: int = DEFAULT_FUEL,
                     max_execs: int = DEFAULT_MAX_EXECS, width: int = 32) -> DiffVerdict:
    """Every original state at an assertion, paired with each witness
    choice, is represented by some transformed state at that assertion.

    In ``exempt`` mode scalars the transformation havocs (loop-modified
    scalars and loop iterators) need not agree, and inside a loop bound to a
    witness index only the element the current iteration visits is
    considered. ``strict`` mode applies the relation literally.
    """
    if mode not in ("exempt", "strict"):
        raise ValueError(f"unknown mode {mode!r}")
    s = _setup(original, width)
    exempt = _exempt_locations(original) if mode == "exempt" else set()
    bound = _s3_constraints(original) if mode == "exempt" else {}
    scalars = [(n, ty) for n, ty in _scalar_locations(original) if n not in exempt]
    arrays = {d.name: d for d in original.declarations if d.is_array}
    total = 0
    for d in defaults:
        orig = run_original(original, fuel=fuel, array_default=d, tracing=True, compiled=s.orig_c)
        if orig.status in ("error", "inconclusive"):
            return DiffVerdict("represents", "inconclusive", total,
                               detail=f"original run {orig.status}: {orig.detail}")
        pol = _policy_for(policy, original, orig, d)
        snaps: dict[int, list] = {}

        def keep(o: Outcome) -> None:
            for ordinal, state, memo in o.trace:
                snaps.setdefault(ordinal, []).append((state, memo))

        en = enumerate_transformed(s.transformed, pol, fuel=fuel, max_execs=max_execs,
                                   x_default=d, witness=s.pairs, tracing=True,
                                   compiled=s.trans_c, width=width, on_outcome=keep,
                                   horizon=len(s.trans_c.ordinals))
        total += en.executions
        if not en.complete:
            return DiffVerdict("represents", "inconclusive", total,
                               detail=f"execution cap {max_execs} reached")
        for ordinal, state, _memo in orig.trace:
            fixed = {a: state.get(it, 0) for a, it in bound.get(ordinal, [])}
            ranges = [[fixed[p.array]] if p.array in fixed else range(p.size) for p in s.pairs]
            for combo in itertools.product(*ranges):
                if not _represented(state, combo, s.pairs, arrays, scalars,
                                    snaps.get(ordinal, []), d, pol):
                    cx = Counterexample(
                        emit(original), d, orig, None, tuple(en.outcomes),
                        tuple(sorted(pol.values)), pol.cap,
                        detail=(f"no transformed state at assertion {ordinal} represents "
                                f"the original with witness indices {dict(zip((p.array for p in s.pairs), combo))}"),
                    )
                    return DiffVerdict("represents", "violated", total, cx, cx.detail)
    return DiffVerdict("represents", "holds", total)


def _represented(state: dict, combo, pairs: list[WitnessPair], arrays: dict, scalars,
                 candidates: list, default: int, policy: NdPolicy) -> bool:
    for tstate, memo in candidates:
        wanted: list = []
        ok = True
        for p, c in zip(pairs, combo):
            if tstate.get(p.index_var, 0) != c:
                ok = False
                break
            decl = arrays[p.array]
            if decl.is_record:
                for f, ty in decl.fields:
                    wanted.append((tstate.get(f"{p.value_var}.{f}", ty.wrap(default)),
                                   state.get((p.array, c, f), ty.wrap(default))))
            else:
                wanted.append((tstate.get(p.value_var, decl.scalar.wrap(default)),
                               state.get((p.array, c), decl.scalar.wrap(default))))
        if not ok:
            continue
        wanted.extend((tstate.get(n, 0), state.get(n, 0)) for n, _ty in scalars)
        if _matches(wanted, memo, policy):
            return True
    return False


def replay(cx: Counterexample, width: int = 32) -> tuple[Outcome, Optional[Outcome]]:
    """Re-execute a counterexample: the original run and, when the
    counterexample carries a choice sequence, that transformed execution."""
    from ..frontend import parse

    original = parse(cx.program, int_width=width)
    orig = run_original(original, array_default=cx.array_default, width=width)
    if cx.choices is None:
        return orig, None
    transformed, report = transform_program(original, TransformConfig(int_width=width))
    pol = NdPolicy(frozenset(cx.policy_values), cx.cap)
    c = Compiled(transformed, width)
    o = c.execute(FixedChooser(cx.choices), pol, array_default=cx.array_default,
                  initial=witness_initial(transformed, report.pairs, cx.array_default))
    return orig, o
