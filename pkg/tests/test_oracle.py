import json

import pytest
from hypothesis import given, settings, strategies as st

from arraywitness.frontend import parse
from arraywitness.harness.generator import GenLimits, gen_program
from arraywitness.oracle import (
    Compiled, NdPolicy, check_precision_empirical, check_represents, check_soundness,
    enumerate_transformed, program_constants, replay, run_original,
)
from arraywitness.ast import ScalarType
from arraywitness.transform import transform_program

from helpers import read, scaled_squares

TWO_ITER = "int a[2]; int i; a[0] = 1; for (i = 0; i < 2; i++) { assert(a[i] == 1); }"
UNSAFE_TOY = ("int a[2]; int i; for (i = 0; i < 2; i++) { a[i] = i; }"
              " for (i = 0; i < 2; i++) { assert(a[i] == 0); }")


def transformed(src: str):
    return parse(src, transformed=True)


class TestRunOriginal:
    def test_squares_is_safe(self):
        assert run_original(parse(read("squares.c"))).status == "pass"

    def test_second_iteration_fails(self):
        o = run_original(parse(TWO_ITER), tracing=True)
        assert o.status == "fail" and o.failed == (1,)
        ordinal, state, _ = o.trace[-1]
        assert state["i"] == 1

    def test_trivial_assert(self):
        assert run_original(parse("int x; assert(1);")).status == "pass"

    def test_failures_do_not_stop_execution(self):
        o = run_original(parse("int x; assert(x == 1); x = 2; assert(x == 3); assert(x == 2);"))
        assert o.failed == (1, 2)

    def test_fuel_exhaustion_is_inconclusive(self):
        p = parse("int i; int x; for (i = 0; i < 1000; i++) { x = x + 1; }")
        assert run_original(p, fuel=10).status == "inconclusive"

    def test_division_by_zero_is_an_error(self):
        assert run_original(parse("int x; int y; y = 1 / x;")).status == "error"

    def test_default_probe(self):
        p = parse("int a[2]; assert(a[1] == 0);")
        assert run_original(p, array_default=0).status == "pass"
        assert run_original(p, array_default=1).status == "fail"

    def test_wraparound(self):
        p = parse("unsigned int u; int x; u = 0 - 1; x = 2147483647; x = x + 1;"
                  " assert(u == 4294967295u); assert(x < 0);")
        assert run_original(p).status == "pass"

    def test_deterministic(self):
        p = gen_program(GenLimits(seed=5))
        assert run_original(p) == run_original(p)


class TestEnumerate:
    def test_scaled_squares_all_pass(self):
        t, report = transform_program(parse(scaled_squares(3)))
        en = enumerate_transformed(t, NdPolicy(cap=64), witness=report.pairs)
        assert en.complete
        assert set(en.outcomes) == {("pass", ())}

    def test_assert_false(self):
        en = enumerate_transformed(transformed("int x; assert(0);"), NdPolicy())
        assert en.complete and list(en.outcomes) == [("fail", (1,))]
        assert en.executions == 1

    def test_nd_read_gives_both_outcomes(self):
        en = enumerate_transformed(transformed("int x; x = nd(); assert(x == 0);"), NdPolicy())
        assert {k[0] for k in en.outcomes} == {"pass", "fail"}

    def test_execution_count_is_product_of_domains(self):
        en = enumerate_transformed(transformed("int x; int y; x = nd(0, 2); y = nd(0, 3);"),
                                   NdPolicy())
        assert en.executions == 12 and en.complete

    def test_cap_gives_inconclusive(self):
        en = enumerate_transformed(transformed("int x; int y; x = nd(0, 9); y = nd(0, 9);"),
                                   NdPolicy(), max_execs=20)
        assert en.inconclusive and en.executions == 20


class TestPolicy:
    def test_small_range_is_full(self):
        assert NdPolicy(cap=4).range_domain(2, 5) == (2, 3, 4, 5)

    def test_large_range_uses_endpoints_and_seeds(self):
        pol = NdPolicy(frozenset({0, 1, 7, 500}), cap=4)
        assert pol.range_domain(3, 99) == (3, 7, 99)

    def test_type_domain_includes_max(self):
        ty = ScalarType("unsigned int", 32, False)
        assert NdPolicy().domain(ty) == (0, 1, 2**32 - 1)

    @given(st.integers(-50, 50), st.integers(0, 200), st.sets(st.integers(-300, 300)),
           st.integers(1, 80))
    def test_range_values_stay_in_bounds(self, lo, width, seeds, cap):
        hi = lo + width
        dom = NdPolicy(frozenset(seeds), cap).range_domain(lo, hi)
        assert dom and all(lo <= v <= hi for v in dom)
        assert lo in dom and hi in dom

    def test_program_constants(self):
        assert program_constants(parse("int x; x = 3 + 7; assert(x != 2);")) == {3, 7, 2}


class TestSoundness:
    def test_safe_original_is_vacuous(self):
        assert check_soundness(parse(scaled_squares(3))).status == "holds"

    def test_unsafe_toy(self):
        v = check_soundness(parse(UNSAFE_TOY))
        assert v.holds and v.executions >= 1

    def test_two_iteration_example(self):
        assert check_soundness(parse(TWO_ITER)).holds

    @pytest.mark.parametrize("seed", range(0, 120, 3))
    def test_generated(self, seed):
        assert check_soundness(gen_program(GenLimits(seed=seed))).status == "holds"


class TestPrecision:
    def test_scaled_squares(self):
        assert check_precision_empirical(parse(scaled_squares(3))).status == "holds"

    def test_non_qualifying_is_out_of_class(self):
        p = parse("int a[2]; int i; int x; for (i = 0; i < 2; i++) { x = x + a[i]; assert(x >= 0); }")
        assert check_precision_empirical(p).status == "out-of-class"

    def test_unsafe_original_is_out_of_class(self):
        p = parse("int a[2]; int i; for (i = 0; i < 2; i++) { assert(a[i] == 2); }")
        assert check_precision_empirical(p).status == "out-of-class"

    def test_false_alarm_counterexample_replays(self):
        # safe but outside the precise class: the havocked sum gives a false alarm
        src = ("int a[2]; int i; int s; for (i = 0; i < 2; i++) { s = s + 1; }"
               " for (i = 0; i < 2; i++) { assert(s == 2); }")
        v = check_precision_empirical(parse(src), require_class=False)
        assert v.status == "violated"
        cx = v.counterexample
        orig, trans = replay(cx)
        assert orig.key == cx.original.key
        assert trans.failed
        assert json.loads(json.dumps(cx.to_dict()))["choices"] == list(cx.choices)
        assert replay(cx)[1].key == trans.key


class TestRepresents:
    def test_straight_line_writes(self):
        v = check_represents(parse("int a[2]; a[0] = 7; a[1] = 9; assert(1);"))
        assert v.status == "holds"

    def test_untouched_array(self):
        assert check_represents(parse("int a[3]; assert(1);")).status == "holds"

    def test_scalar_only(self):
        assert check_represents(parse("int x; int y; x = 2; y = x + 1; assert(y == 3);")).holds

    def test_strict_mode_on_straight_line(self):
        v = check_represents(parse("int a[2]; int x; x = 4; a[1] = x; assert(1);"), mode="strict")
        assert v.holds

    def test_full_access_loop(self):
        v = check_represents(parse(
            "int a[2]; int i; int k; for (i = 0; i < 2; i++) { k = i; a[i] = k; assert(a[i] == k); }"))
        assert v.holds

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            check_represents(parse("int x; assert(1);"), mode="loose")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_soundness_on_random_seeds(seed):
    v = check_soundness(gen_program(GenLimits(seed=seed)))
    assert v.status == "holds"


def test_compiled_program_is_reusable():
    p = parse(TWO_ITER)
    c = Compiled(p)
    assert run_original(p, compiled=c) == run_original(p, compiled=c)
