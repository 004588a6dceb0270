from __future__ import annotations

import re
from dataclasses import dataclass

from ..ast import Span
from .errors import Diagnostic, ParseError

KEYWORDS = {
    "if", "else", "for", "assert", "struct", "int", "unsigned", "signed",
    "char", "short", "long", "_Bool", "void", "return",
    # recognised only so they can be rejected with a useful message
    "while", "do", "switch", "case", "goto", "break", "continue", "typedef",
    "float", "double", "union", "enum", "static", "const", "volatile",
}

PUNCT = [
    "<<=", ">>=", "...",
    "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "==", "!=",
    "<=", ">=", "&&", "||", "<<", ">>", "->",
    "+", "-", "*", "/", "%", "<", ">", "=", "!", "~", "&", "|", "^", "?",
    ":", ";", ",", ".", "(", ")", "[", "]", "{", "}",
]

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)"
    r"|(?P<nl>\n)"
    r"|(?P<num>0[xX][0-9a-fA-F]+[uUlL]*|[0-9]+[uUlL]*)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>" + "|".join(re.escape(p) for p in PUNCT) + ")"
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'num', 'id', 'kw', 'punct', 'eof'
    text: str
    span: Span

    def __repr__(self) -> str:
        return f"{self.kind}:{self.text!r}@{self.span}"


def strip_comments(text: str) -> str:
    """Blank out comments and preprocessor lines, keeping line/column layout."""
    out = []
    i, n = 0, len(text)
    at_line_start = True
    while i < n:
        c = text[i]
        if at_line_start and c == "#":
            j = text.find("\n", i)
            j = n if j < 0 else j
            out.append(" " * (j - i))
            i = j
            continue
        if c == "/" and text.startswith("//", i):
            j = text.find("\n", i)
            j = n if j < 0 else j
            out.append(" " * (j - i))
            i = j
            continue
        if c == "/" and text.startswith("/*", i):
            j = text.find("*/", i + 2)
            j = n if j < 0 else j + 2
            out.append("".join(ch if ch == "\n" else " " for ch in text[i:j]))
            i = j
            continue
        if c == "\n":
            at_line_start = True
        elif not c.isspace():
            at_line_start = False
        out.append(c)
        i += 1
    return "".join(out)


def tokenize(text: str) -> list[Token]:
    text = strip_comments(text)
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = Span(line, pos - line_start + 1)
            raise ParseError([Diagnostic("syntax", f"unexpected character {text[pos]!r}", span)])
        kind = m.lastgroup
        span = Span(line, pos - line_start + 1)
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "id":
            word = m.group()
            tokens.append(Token("kw" if word in KEYWORDS else "id", word, span))
        elif kind in ("num", "punct"):
            tokens.append(Token(kind, m.group(), span))
        pos = m.end()
    tokens.append(Token("eof", "", Span(line, pos - line_start + 1)))
    return tokens
