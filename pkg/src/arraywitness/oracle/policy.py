"""Finite enumeration domains standing in for nondeterministic choice."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

from ..ast import Const, Program, ScalarType, all_nodes


@dataclass(frozen=True)
class NdPolicy:
    """``values`` seeds every ``nd()`` domain; ``nd(l,u)`` is enumerated in
    full when it has at most ``cap`` values, otherwise as its two end points
    plus whichever seed values fall inside."""

    values: frozenset = frozenset({0, 1})
    cap: int = 64
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError("cap must be positive")

    def domain(self, ty: ScalarType) -> tuple[int, ...]:
        key = ("nd", ty)
        if key not in self._cache:
            raw = set(self.values) | {0, 1, ty.max}
            self._cache[key] = tuple(sorted({ty.wrap(v) for v in raw}))
        return self._cache[key]

    def range_domain(self, lo: int, hi: int, full: bool = False) -> tuple[int, ...]:
        if hi < lo:
            return ()
        if full or hi - lo + 1 <= self.cap:
            return tuple(range(lo, hi + 1))
        key = ("range", lo, hi)
        if key not in self._cache:
            self._cache[key] = tuple(sorted({lo, hi} | {v for v in self.values if lo <= v <= hi}))
        return self._cache[key]

    def widened(self, extra: Iterable[int]) -> "NdPolicy":
        return replace(self, values=frozenset(self.values) | frozenset(extra), _cache={})


def program_constants(program: Program) -> set[int]:
    return {n.value for n in all_nodes(program) if isinstance(n, Const)}
