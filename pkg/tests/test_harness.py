import json
import sys
import time
from pathlib import Path

import pytest

from arraywitness.ast import For, walk_stmt
from arraywitness.frontend import emit, parse
from arraywitness.harness import (
    BMC_NAMING, BmcConfig, CSV_HEADER, DEFAULT_WEIGHTS, GenLimits, SuiteReport, ToolRun,
    categorize, classify_output, gen_program, read_manifest, render_for_bmc, run_suite,
    run_tool, verify_with_bmc,
)
from arraywitness.oracle import run_original

from helpers import read

FAKE_BMC = Path(__file__).parent / "tools" / "fake_bmc.py"
FAKE_CFG = BmcConfig(command=(sys.executable, str(FAKE_BMC), "{file}"), timeout=60, prelude="")


def canned(output: str, **kw):
    def runner(argv, timeout, grace):
        return ToolRun(0, output, 0.01, **kw)
    return runner


@pytest.fixture
def squares_file(tmp_path):
    path = tmp_path / "squares.c"
    path.write_text(read("squares.c"))
    return path


class TestBmcConfig:
    def test_placeholder_required_once(self):
        with pytest.raises(ValueError):
            BmcConfig(command=("cbmc",))
        with pytest.raises(ValueError):
            BmcConfig(command=("cbmc", "{file}", "{file}"))

    def test_timeout_positive(self):
        with pytest.raises(ValueError):
            BmcConfig(timeout=0)

    def test_from_string(self):
        cfg = BmcConfig.from_string("cbmc --unwind 2 {file}")
        assert cfg.argv("/t/x.c") == ["cbmc", "--unwind", "2", "/t/x.c"]

    def test_from_env(self, monkeypatch):
        monkeypatch.delenv("WITNESS_BMC", raising=False)
        assert BmcConfig.from_env() is None
        monkeypatch.setenv("WITNESS_BMC", "esbmc {file}")
        assert BmcConfig.from_env().command == ("esbmc", "{file}")


class TestMarkers:
    def test_success_marker(self, squares_file):
        v = verify_with_bmc(squares_file, BmcConfig(), runner=canned("** VERIFICATION SUCCESSFUL"))
        assert v.status == "safe" and v.confirmed

    def test_failure_marker_on_precise_program(self, squares_file):
        v = verify_with_bmc(squares_file, BmcConfig(), runner=canned("VERIFICATION FAILED"))
        assert v.status == "unsafe" and v.precise and v.confirmed

    def test_failure_marker_on_imprecise_program(self, tmp_path):
        path = tmp_path / "p.c"
        path.write_text("int a[2]; int i; int s; for (i = 0; i < 2; i++) { s = s + a[i]; assert(s >= 0); }")
        v = verify_with_bmc(path, BmcConfig(), runner=canned("VERIFICATION FAILED"))
        assert v.status == "unsafe" and not v.precise and not v.confirmed

    def test_unknown_output_is_tool_error(self):
        assert classify_output(ToolRun(1, "segfault", 0.1), BmcConfig()) == "tool-error"

    def test_missing_tool(self, squares_file):
        cfg = BmcConfig(command=("/nonexistent/verifier", "{file}"))
        assert verify_with_bmc(squares_file, cfg).status == "tool-error"

    def test_timeout_status(self):
        assert classify_output(ToolRun(None, "", 5.0, timed_out=True), BmcConfig()) == "timeout"

    def test_rendered_program_uses_prelude(self):
        text, precise = render_for_bmc(read("squares.c"), BmcConfig(), "transformed")
        assert "__VERIFIER_nondet_int" in text and "i_a = nd_range(0, 99999);" in text
        assert precise
        body = text[text.index("struct"):]
        assert parse(body, transformed=True, naming=BMC_NAMING)

    def test_original_mode_keeps_loops(self):
        text, _ = render_for_bmc(read("squares.c"), BmcConfig(), "original")
        assert "for (i = 0; i < 100000; i++)" in text


class TestTimeoutContainment:
    def test_sleep_is_killed(self):
        t0 = time.monotonic()
        run = run_tool(["sh", "-c", "sleep 30 & sleep 30"], timeout=0.5, grace=0.5)
        assert run.timed_out
        assert time.monotonic() - t0 < 0.5 + 0.5 + 1.0

    def test_completed_run(self):
        run = run_tool(["sh", "-c", "echo VERIFICATION SUCCESSFUL"], timeout=5)
        assert not run.timed_out and "SUCCESSFUL" in run.output


def _toy_corpus(directory: Path, count: int = 10) -> dict:
    expected = {}
    seed = 0
    while len(expected) < count:
        prog = gen_program(GenLimits(seed=seed, max_stmts=6))
        o = run_original(prog)
        name = f"toy{seed:03d}"
        (directory / f"{name}.c").write_text(emit(prog))
        expected[name] = "safe" if o.status == "pass" else "unsafe"
        seed += 1
    return expected


class TestSuite:
    def test_accounting(self, tmp_path):
        expected = _toy_corpus(tmp_path)
        (tmp_path / "broken.c").write_text("int x; x = ;")
        report = run_suite(tmp_path, FAKE_CFG, expected, workers=4)
        counts = report.counts
        assert sum(counts.values()) == 11
        assert counts["no-result"] == 1
        broken = next(r for r in report.rows if r.name == "broken")
        assert broken.verdict == "parse-error"
        # an over-approximation never turns a violation into a safe verdict
        assert counts["incorrect-true"] == 0

    def test_qualifying_safe_corpus_has_no_false_alarms(self, tmp_path):
        src = read("squares.c").replace("100000", "3")
        for n in range(3):
            (tmp_path / f"squares_{n}.c").write_text(src)
        report = run_suite(tmp_path, FAKE_CFG, workers=2)
        assert report.counts["correct-true"] == 3
        assert report.counts["incorrect-false"] == 0

    def test_record_then_replay_is_reproducible(self, tmp_path):
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        expected = _toy_corpus(corpus, 4)
        rec = tmp_path / "rec"
        first = run_suite(corpus, FAKE_CFG, expected, record=rec)
        cfg = BmcConfig(command=("/nonexistent", "{file}"))
        again = run_suite(corpus, cfg, expected, replay=rec)
        assert again.to_csv() == run_suite(corpus, cfg, expected, replay=rec).to_csv()
        assert [r.verdict for r in again.rows] == [r.verdict for r in first.rows]
        assert sorted(p.stem for p in rec.glob("*.json")) == sorted(expected)

    def test_csv_and_json_reports(self, tmp_path):
        corpus = tmp_path / "c"
        corpus.mkdir()
        report = run_suite(corpus, FAKE_CFG, _toy_corpus(corpus, 2))
        report.write(tmp_path / "r.csv")
        report.write(tmp_path / "r.json")
        assert (tmp_path / "r.csv").read_text().splitlines()[0] == ",".join(CSV_HEADER)
        doc = json.loads((tmp_path / "r.json").read_text())
        assert doc["programs"] == 2 and sum(doc["counts"].values()) == 2

    def test_categories(self):
        assert categorize("safe", "safe") == "correct-true"
        assert categorize("unsafe", "unsafe") == "correct-false"
        assert categorize("unsafe", "safe") == "incorrect-true"
        assert categorize("safe", "unsafe") == "incorrect-false"
        assert categorize("safe", "timeout") == "no-result"
        assert categorize(None, "safe") == "no-result"

    def test_manifest(self, tmp_path):
        path = tmp_path / "expected.txt"
        path.write_text("# comment\nfoo.c safe\nbar unsafe\n")
        assert read_manifest(path) == {"foo": "safe", "bar": "unsafe"}
        path.write_text("foo maybe\n")
        with pytest.raises(ValueError):
            read_manifest(path)

    def test_empty_report(self):
        assert set(SuiteReport().counts.values()) == {0}


class TestGenerator:
    def test_deterministic(self):
        assert gen_program(GenLimits(seed=42)) == gen_program(GenLimits(seed=42))

    def test_seeds_differ(self):
        assert emit(gen_program(GenLimits(seed=1))) != emit(gen_program(GenLimits(seed=2)))

    def test_loop_weight_zero(self):
        weights = dict(DEFAULT_WEIGHTS, loop=0)
        for seed in range(50):
            prog = gen_program(GenLimits(seed=seed, weights=weights))
            assert not any(isinstance(s, For) for s in walk_stmt(prog.body))

    def test_limits_respected(self):
        for seed in range(200):
            prog = gen_program(GenLimits(seed=seed))
            assert all(d.size <= 4 for d in prog.declarations if d.is_array)
            assert "assert" in emit(prog)

    def test_five_hundred_seeds_parse_and_run(self):
        for seed in range(500):
            prog = gen_program(GenLimits(seed=seed))
            assert parse(emit(prog)) == prog
            assert run_original(prog).status in ("pass", "fail")
