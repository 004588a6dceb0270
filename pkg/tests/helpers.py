"""Shared test utilities."""
from __future__ import annotations

import dataclasses
from pathlib import Path

from arraywitness.ast import Assign, Nd, NdRange, Program, Seq, Var

DATA = Path(__file__).parent / "data"


def read(name: str) -> str:
    return (DATA / name).read_text()


def scaled_squares(size: int) -> str:
    return read("squares.c").replace("100000", str(size))


def _rename(node, names: dict):
    if isinstance(node, tuple):
        return tuple(_rename(n, names) for n in node)
    if not dataclasses.is_dataclass(node) or isinstance(node, type):
        return node
    changes = {}
    for f in dataclasses.fields(node):
        v = getattr(node, f.name)
        if f.name in ("name", "array", "iterator") and isinstance(v, str):
            changes[f.name] = names.get(v, v)
        elif f.name == "struct_tag" and v is not None:
            changes[f.name] = "T"
        elif isinstance(v, (tuple,)) or dataclasses.is_dataclass(v):
            changes[f.name] = _rename(v, names)
    return dataclasses.replace(node, **changes)


def normalize(program: Program, witness_vars=("i_a",)) -> Program:
    """Alpha-rename declarations by position and read ranged havocs of
    ordinary variables as unconstrained ``nd()``."""
    names = {d.name: f"v{n}" for n, d in enumerate(program.declarations)}

    def fix(s):
        if isinstance(s, Assign) and isinstance(s.value, NdRange) and isinstance(s.target, Var) \
                and s.target.name not in witness_vars:
            return Assign(s.target, Nd())
        return s

    body = program.body
    if isinstance(body, Seq):
        body = Seq(tuple(fix(s) for s in body.stmts))
    return _rename(Program(program.declarations, body), names)
