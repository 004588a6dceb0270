import time

import pytest

from arraywitness.ast import (
    ArrayAccess, Assign, Cond, CondAssign, For, If, LvalRead, Nd, NdRange, Var, all_nodes,
    walk_stmt,
)
from arraywitness.frontend import NdNaming, emit, emit_expr, parse, validate_transformed
from arraywitness.harness.generator import GenLimits, gen_program
from arraywitness.transform import TransformConfig, TransformError, transform_program

from helpers import normalize, read


def transform(src: str, **kw):
    return transform_program(parse(src), TransformConfig(**kw))


def stmt_texts(program) -> list[str]:
    lines = emit(program).splitlines()
    start = lines.index("{") + 1
    return [l.strip() for l in lines[start:-1]]


class TestGolden:
    def test_squares_matches_golden(self):
        t0 = time.perf_counter()
        out, report = transform(read("squares.c"))
        elapsed = time.perf_counter() - t0
        golden = parse(read("squares_witness.c"), transformed=True)
        assert normalize(out) == normalize(golden)
        assert elapsed < 1.0
        assert report.s3 == 2 and report.s4 == 0

    def test_squares_prologue(self):
        out, _ = transform(read("squares.c"))
        assert stmt_texts(out)[0] == "i_a = nd(0, 99999);"

    def test_first_loop_body(self):
        out, _ = transform(read("squares.c"))
        texts = stmt_texts(out)
        assert texts[1:7] == [
            "k = nd();",
            "i = i_a;",
            "k = i;",
            "(i == i_a) ? x_a.p = k : k;",
            "(i == i_a) ? x_a.q = k * k : k * k;",
            "k = nd();",
        ]

    def test_assertion_rewrite(self):
        out, _ = transform(read("squares.c"))
        assert ("assert(((i == i_a) ? x_a.q : nd()) == "
                "((i == i_a) ? x_a.p : nd()) * ((i == i_a) ? x_a.p : nd()));") in stmt_texts(out)


class TestRules:
    def test_array_free_program_unchanged(self):
        p = parse("int x; int y; x = 5; if (x > 1) { y = x * x; } assert(y == 25);")
        out, report = transform_program(p)
        assert out == p
        assert report.counts["P"] == 0

    def test_one_witness_per_array(self):
        out, report = transform("int a[2]; int b[3]; int x; a[0] = 1; b[2] = a[1]; x = b[0];")
        assert stmt_texts(out)[:2] == ["i_a = nd(0, 1);", "i_b = nd(0, 2);"]
        assert [(p.array, p.index_var, p.value_var) for p in report.pairs] == [
            ("a", "i_a", "x_a"), ("b", "i_b", "x_b")]
        assert "(2 == i_b) ? x_b = ((1 == i_a) ? x_a : nd()) : ((1 == i_a) ? x_a : nd());" \
            in stmt_texts(out)

    def test_offset_read(self):
        out, _ = transform("int a[4]; int j; int x; x = a[j+1];")
        assign = out.body.stmts[1]
        assert emit_expr(assign.value) == "((j + 1 == i_a) ? x_a : nd())"

    def test_scalar_assignment_is_kept(self):
        out, _ = transform("int a[1]; int x; x = 5;")
        assert out.body.stmts[1] == Assign(Var("x"), parse("int x; x = 5;").body.value)

    def test_partial_loop_uses_guarded_block(self):
        out, report = transform("int a[4]; int i; int s; for (i = 0; i < 2; i++) { s = s + a[i]; }")
        assert report.s4 == 1
        guard = next(s for s in walk_stmt(out.body) if isinstance(s, If))
        assert guard.cond == NdRange(0, 1)
        picks = [s for s in walk_stmt(guard.then) if isinstance(s, Assign) and s.target == Var("i")]
        assert picks[0].value == NdRange(0, 1)

    def test_unknown_bound_uses_type_range(self):
        out, _ = transform("int a[4]; int i; int n; for (i = 0; i < n; i++) { a[i] = 0; }")
        picks = [s for s in walk_stmt(out.body) if isinstance(s, Assign) and s.target == Var("i")]
        assert picks[0].value == NdRange(-2**31, 2**31 - 1)

    def test_array_in_loopdefs_havocs_its_witness(self):
        out, _ = transform("int a[4]; int i; for (i = 0; i < 3; i++) { a[i+1] = 0; }")
        assert "x_a = nd();" in stmt_texts(out)

    def test_assert_stays_inside_guard(self):
        out, _ = transform("int a[4]; int i; for (i = 0; i < 2; i++) { assert(a[i] == 0); }")
        guard = next(s for s in walk_stmt(out.body) if isinstance(s, If))
        assert any(type(s).__name__ == "Assert" for s in walk_stmt(guard.then))

    def test_refuses_transformed_input(self):
        golden = parse(read("squares_witness.c"), transformed=True)
        with pytest.raises(TransformError):
            transform_program(golden)

    def test_fresh_names_avoid_collisions(self):
        out, report = transform("int a[2]; int i_a; int x_a; i_a = a[0]; x_a = 1;")
        pair = report.pairs[0]
        assert pair.index_var not in ("i_a",) and pair.value_var != "x_a"
        names = [d.name for d in out.declarations]
        assert len(names) == len(set(names))

    def test_custom_nd_naming(self):
        naming = NdNaming("havoc", "havoc_range")
        out, _ = transform(read("squares.c"), naming=naming)
        text = emit(out, naming)
        assert "i_a = havoc_range(0, 99999);" in text and "k = havoc();" in text


def _count(program, kind):
    return sum(isinstance(n, kind) for n in all_nodes(program))


class TestProperties:
    @pytest.mark.parametrize("seed", range(0, 400, 7))
    def test_conformance_and_accounting(self, seed):
        prog = gen_program(GenLimits(seed=seed))
        out, report = transform_program(prog)
        assert validate_transformed(out).ok
        assert report.s3 + report.s4 == _count(prog, For)
        assert report.counts["S1"] + report.counts["E2"] == _count(prog, ArrayAccess)
        assert not any(isinstance(n, (For, ArrayAccess)) for n in all_nodes(out))

    def test_deterministic(self):
        prog = gen_program(GenLimits(seed=11))
        assert emit(transform_program(prog)[0]) == emit(transform_program(prog)[0])

    def test_report_document(self):
        _, report = transform(read("squares.c"))
        doc = report.to_dict()
        assert doc["rules"]["S3"] == 2 and doc["rules"]["P"] == 1
        assert doc["witness_pairs"] == [{"array": "a", "index_var": "i_a", "value_var": "x_a",
                                         "size": 100000}]

    def test_witness_expressions_only(self):
        out, _ = transform(read("squares.c"))
        conds = [n for n in all_nodes(out) if isinstance(n, (Cond, CondAssign))]
        assert conds and all(emit_expr(c.cond) == "i == i_a" for c in conds)
        assert all(isinstance(c.orelse, Nd) for c in conds if isinstance(c, Cond))
        assert not any(isinstance(n, LvalRead) and n.lval == Var("a") for n in all_nodes(out))
