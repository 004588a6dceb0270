from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..ast import Span


@dataclass(frozen=True)
class Diagnostic:
    kind: str  # 'syntax' | 'type' | 'unsupported'
    message: str
    span: Optional[Span] = None
    expected: tuple[str, ...] = ()

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        text = f"{where}{self.kind} error: {self.message}"
        if self.expected:
            text += f" (expected {', '.join(self.expected)})"
        return text


class ParseError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))

    @property
    def kinds(self) -> set[str]:
        return {d.kind for d in self.diagnostics}
