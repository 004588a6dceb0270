import json
import sys
from pathlib import Path

import pytest

from arraywitness.cli import main
from arraywitness.frontend import parse

from helpers import normalize, read

UNSAFE_TOY = ("int a[2]; int i; for (i = 0; i < 2; i++) { a[i] = i; }\n"
              "for (i = 0; i < 2; i++) { assert(a[i] == 0); }\n")


@pytest.fixture
def squares_file(tmp_path):
    path = tmp_path / "squares.c"
    path.write_text(read("squares.c"))
    return path


def test_transform_matches_golden(squares_file, tmp_path):
    out = tmp_path / "squares_t.c"
    report = tmp_path / "report.json"
    assert main(["transform", str(squares_file), "-o", str(out), "--report", str(report)]) == 0
    produced = parse(out.read_text(), transformed=True)
    assert normalize(produced) == normalize(parse(read("squares_witness.c"), transformed=True))
    assert json.loads(report.read_text())["rules"]["S3"] == 2


def test_transform_nd_prefix(squares_file, capsys):
    assert main(["transform", str(squares_file), "--nd-prefix", "pick"]) == 0
    text = capsys.readouterr().out
    assert "i_a = pick_range(0, 99999);" in text and "k = pick();" in text


def test_transform_bmc_prelude(squares_file, capsys):
    assert main(["transform", str(squares_file), "--bmc-prelude"]) == 0
    assert "__VERIFIER_nondet_int" in capsys.readouterr().out


def test_oracle_soundness_on_unsafe_toy(tmp_path, capsys):
    path = tmp_path / "unsafe_toy.c"
    path.write_text(UNSAFE_TOY)
    assert main(["oracle", "soundness", str(path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "holds" and doc["program"] == "unsafe_toy"


def test_oracle_generated_seed(capsys):
    assert main(["oracle", "precision", "--seed", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["property"] == "precision"


def test_oracle_represents(tmp_path, capsys):
    path = tmp_path / "p.c"
    path.write_text("int a[2]; a[0] = 7; a[1] = 9; assert(1);")
    assert main(["oracle", "represents", str(path), "--mode", "strict"]) == 0


def test_oracle_needs_input(capsys):
    assert main(["oracle", "soundness"]) == 2


def test_facts(squares_file, capsys):
    assert main(["facts", str(squares_file)]) == 0
    text = capsys.readouterr().out
    assert "rule: S3" in text
    assert main(["facts", str(squares_file), "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["assertions"][0]["qualifies"] is True


def test_gen_writes_manifest(tmp_path):
    out = tmp_path / "corpus"
    assert main(["gen", "--seed", "7", "--count", "3", "--out", str(out)]) == 0
    assert sorted(p.name for p in out.glob("*.c")) == [
        "gen_000007.c", "gen_000008.c", "gen_000009.c"]
    assert len((out / "expected.txt").read_text().split("\n")) >= 3


def test_suite_with_stand_in_checker(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    assert main(["gen", "--count", "3", "--out", str(corpus), "--max-stmts", "5"]) == 0
    fake = f"{sys.executable} {Path(__file__).parent / 'tools' / 'fake_bmc.py'} {{file}}"
    report = tmp_path / "r.json"
    code = main(["suite", str(corpus), "--bmc", fake, "--expect", str(corpus / "expected.txt"),
                 "--out", str(report)])
    doc = json.loads(report.read_text())
    assert doc["programs"] == 3
    assert code in (0, 1)
    assert code == (1 if doc["counts"]["incorrect-true"] or doc["counts"]["incorrect-false"] else 0)


def test_verify_without_checker_is_usage_error(squares_file, monkeypatch):
    monkeypatch.delenv("WITNESS_BMC", raising=False)
    assert main(["verify", str(squares_file)]) == 2


def test_no_arguments(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_flag(capsys):
    assert main(["transform", "--frobnicate", "x.c"]) == 2


def test_parse_error_exit(tmp_path, capsys):
    path = tmp_path / "bad.c"
    path.write_text("int x;\nx = ;\n")
    assert main(["transform", str(path)]) == 2
    assert "syntax error" in capsys.readouterr().err


def test_missing_file(capsys):
    assert main(["transform", "/nonexistent.c"]) == 2


def test_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.startswith("arraywitness ")
