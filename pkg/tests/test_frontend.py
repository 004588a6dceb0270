import pytest

from arraywitness.ast import (
    ArrayAccess, Assert, Assign, BinOp, Cond, CondAssign, Const, Field, For, LvalRead,
    Nd, NdRange, Program, Seq, Span, Var, VarDecl, int_type, walk_stmt,
)
from arraywitness.frontend import (
    NdNaming, ParseError, emit, emit_expr, parse, validate_transformed,
)
from arraywitness.frontend.lexer import strip_comments, tokenize

from helpers import read


@pytest.fixture
def squares():
    return parse(read("squares.c"))


class TestParse:
    def test_squares_shape(self, squares):
        loops = [s for s in walk_stmt(squares.body) if isinstance(s, For)]
        assert len(loops) == 2
        assert {l.iterator for l in loops} == {"i"}
        a = squares.decl("a")
        assert a.size == 100000 and a.kind == "array-of-record"
        assert [f for f, _ in a.fields] == ["p", "q"]
        assert all(not t.signed for _, t in a.fields)

    def test_smallest_assignment(self):
        p = parse("int x; x = 5;")
        assert p.body == Assign(Var("x"), Const(5))

    def test_two_dimensional_array_is_unsupported(self):
        with pytest.raises(ParseError) as exc:
            parse("int a[3][3];")
        assert exc.value.kinds == {"unsupported"}

    @pytest.mark.parametrize("src", [
        "int x; while (x) { x = 1; }",
        "int *p;",
        "int x = 3;",
        "int f(void) { return 1; } int main() { }",
        "int x; switch (x) { }",
        "int x; x;",
    ])
    def test_unsupported_constructs(self, src):
        with pytest.raises(ParseError) as exc:
            parse(src)
        assert "unsupported" in exc.value.kinds
        assert all(d.span is not None for d in exc.value.diagnostics)

    def test_indexing_a_scalar_is_a_type_error(self):
        with pytest.raises(ParseError) as exc:
            parse("int x; x[0] = 1;")
        assert exc.value.kinds == {"type"}

    def test_undeclared_variable(self):
        with pytest.raises(ParseError) as exc:
            parse("int x; y = 1;")
        assert exc.value.kinds == {"type"}

    def test_syntax_error_reports_position(self):
        with pytest.raises(ParseError) as exc:
            parse("int x;\nx = (1 + ;")
        d = exc.value.diagnostics[0]
        assert d.kind == "syntax" and d.span.line == 2

    def test_nd_rejected_in_input(self):
        with pytest.raises(ParseError):
            parse("int x; x = nd();")

    def test_sugar_desugars(self):
        p = parse("int i; int s; int a[4]; for (i = 0; i < 4; ++i) { s += a[i]; a[i]++; }")
        loop = p.body
        assert loop.step == BinOp("+", LvalRead(Var("i")), Const(1))
        s1, s2 = loop.body.stmts
        assert s1 == Assign(Var("s"), BinOp("+", LvalRead(Var("s")),
                                            LvalRead(ArrayAccess("a", LvalRead(Var("i"))))))
        assert s2.target == ArrayAccess("a", LvalRead(Var("i")))

    def test_literals(self):
        p = parse("unsigned int x; x = 0x10 + 010 + 3u + -2;")
        e = p.body.value
        consts = []
        while isinstance(e, BinOp):
            consts.append(e.right)
            e = e.left
        consts.append(e)
        assert [c.value for c in reversed(consts)] == [16, 8, 3, -2]
        assert consts[1].unsigned

    def test_spans_point_into_source(self, squares):
        loops = [s for s in walk_stmt(squares.body) if isinstance(s, For)]
        assert loops[0].span == Span(9, 3)

    def test_comments_and_directives_keep_layout(self):
        text = "#include <x>\nint x; // c\n/* a\n b */ x = 1;"
        stripped = strip_comments(text)
        assert stripped.count("\n") == text.count("\n")
        assert parse(text).body.span.line == 4

    def test_tokenize_ends_with_eof(self):
        assert tokenize("x = 1;")[-1].kind == "eof"

    def test_precedence(self):
        p = parse("int x; x = 1 + 2 * 3 - 4 - 5;")
        assert emit_expr(p.body.value) == "1 + 2 * 3 - 4 - 5"
        p = parse("int x; x = 1 - (2 - 3);")
        assert emit_expr(p.body.value) == "1 - (2 - 3)"


class TestTransformedMode:
    def test_golden_parses(self):
        p = parse(read("squares_witness.c"), transformed=True)
        kinds = {type(s) for s in walk_stmt(p.body)}
        assert CondAssign in kinds and Assert in kinds and For not in kinds

    def test_custom_naming(self):
        naming = NdNaming("havoc", "havoc_in")
        p = parse("int x; x = havoc(); x = havoc_in(0, 2);", transformed=True, naming=naming)
        assert p.body.stmts[0].value == Nd()
        assert p.body.stmts[1].value == NdRange(0, 2)
        assert parse(emit(p, naming), transformed=True, naming=naming) == p


class TestEmit:
    def test_single_assert_line(self):
        text = emit(parse("int x; assert(x == 1);"))
        assert "  assert(x == 1);" in text.splitlines()

    def test_round_trip_squares(self, squares):
        assert parse(emit(squares)) == squares
        assert emit(parse(emit(squares))) == emit(squares)

    def test_cond_assign_form(self):
        p = parse(read("squares_witness.c"), transformed=True)
        text = emit(p)
        assert "(i == i_a) ? x_a.p = k : k;" in text
        assert "((i == i_a) ? x_a.q : nd())" in text

    def test_prelude(self):
        text = emit(parse("int x; x = 1;"), prelude="/* prelude */\n")
        assert text.startswith("/* prelude */")


class TestValidate:
    def test_golden_conforms(self):
        assert validate_transformed(parse(read("squares_witness.c"), transformed=True)).ok

    def test_untransformed_squares(self, squares):
        report = validate_transformed(squares)
        assert report.count("loop") == 2
        assert report.count("array-access") >= 3

    def test_single_residual_access(self):
        span = Span(3, 7)
        prog = Program(
            (VarDecl("a", scalar=int_type(), size=2), VarDecl("x", scalar=int_type())),
            Seq((Assign(Var("x"), Const(1)),
                 Assign(Var("x"), LvalRead(ArrayAccess("a", Const(0), span=span))))),
        )
        report = validate_transformed(prog)
        assert len(report.violations) == 1
        assert report.violations[0].kind == "array-access"
        assert report.violations[0].span == span

    def test_empty_range(self):
        prog = Program((VarDecl("x", scalar=int_type()),), Assign(Var("x"), NdRange(3, 2)))
        assert validate_transformed(prog).count("empty-range") == 1
