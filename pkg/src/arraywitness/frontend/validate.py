from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..ast import ArrayAccess, For, NdRange, Program, Span, all_nodes


@dataclass(frozen=True)
class Violation:
    kind: str  # 'loop' | 'array-access' | 'empty-range'
    detail: str
    span: Optional[Span] = None


@dataclass
class ConformanceReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def count(self, kind: str) -> int:
        return sum(1 for v in self.violations if v.kind == kind)

    def __bool__(self) -> bool:
        return bool(self.violations)


def validate_transformed(program: Program) -> ConformanceReport:
    """Check a program against the loop-free, array-free output grammar."""
    report = ConformanceReport()
    for node in all_nodes(program):
        if isinstance(node, For):
            report.violations.append(Violation("loop", f"for loop over {node.iterator!r}", node.span))
        elif isinstance(node, ArrayAccess):
            report.violations.append(Violation("array-access", f"subscript of {node.array!r}", node.span))
        elif isinstance(node, NdRange) and node.lo > node.hi:
            report.violations.append(Violation("empty-range", f"nd({node.lo}, {node.hi})", node.span))
    return report
