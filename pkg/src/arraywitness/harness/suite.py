"""Run the transformation plus a model checker over a directory of programs
and tally results in the five categories of the benchmark table."""
from __future__ import annotations

import csv
import io
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..frontend import ParseError, parse
from ..oracle import run_original
from .bmc import BmcConfig, Recorder, Replayer, run_tool, verify_with_bmc

CATEGORIES = ("correct-true", "correct-false", "incorrect-true", "incorrect-false", "no-result")
CSV_HEADER = ("name", "expected", "verdict", "seconds", "precise")


@dataclass
class SuiteRow:
    name: str
    expected: Optional[str]  # 'safe' | 'unsafe' | None
    verdict: str  # Verdict.status, or 'parse-error'
    seconds: float
    precise: Optional[bool]
    category: str
    detail: str = ""


def categorize(expected: Optional[str], verdict: str) -> str:
    if expected not in ("safe", "unsafe") or verdict not in ("safe", "unsafe"):
        return "no-result"
    if verdict == "safe":
        return "correct-true" if expected == "safe" else "incorrect-true"
    return "correct-false" if expected == "unsafe" else "incorrect-false"


@dataclass
class SuiteReport:
    rows: list[SuiteRow] = field(default_factory=list)

    @property
    def counts(self) -> dict[str, int]:
        out = {c: 0 for c in CATEGORIES}
        for r in self.rows:
            out[r.category] += 1
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([r.name, r.expected or "", r.verdict, f"{r.seconds:.3f}",
                        "" if r.precise is None else str(r.precise).lower()])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "programs": len(self.rows),
            "counts": self.counts,
            "rows": [
                {"name": r.name, "expected": r.expected, "verdict": r.verdict,
                 "seconds": round(r.seconds, 3), "precise": r.precise,
                 "category": r.category, "detail": r.detail}
                for r in self.rows
            ],
        }

    def write(self, path) -> None:
        path = Path(path)
        if path.suffix == ".csv":
            path.write_text(self.to_csv())
        else:
            path.write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def read_manifest(path) -> dict[str, str]:
    """Two columns per line: program name and ``safe`` or ``unsafe``."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[1] not in ("safe", "unsafe"):
            raise ValueError(f"{path}:{n}: expected '<name> safe|unsafe'")
        out[Path(parts[0]).stem] = parts[1]
    return out


def _oracle_expectation(source: str, width: int) -> Optional[str]:
    o = run_original(parse(source, int_width=width))
    if o.status == "pass":
        return "safe"
    if o.status == "fail":
        return "unsafe"
    return None


def run_suite(directory, cfg: BmcConfig, expectations: Optional[dict] = None, *,
              workers: int = 4, replay=None, record=None, use_oracle: bool = True,
              width: int = 32) -> SuiteReport:
    """Transform and verify every ``*.c`` file in ``directory``.

    Expected verdicts come from ``expectations`` or, failing that, from a
    concrete run of the original when ``use_oracle`` is set.
    """
    files = sorted(Path(directory).glob("*.c"))
    expectations = expectations or {}
    report = SuiteReport()
    lock = threading.Lock()

    def one(path: Path) -> None:
        name = path.stem
        expected = expectations.get(name)
        try:
            source = path.read_text()
            if expected is None and use_oracle:
                expected = _oracle_expectation(source, width)
            if replay is not None:
                runner = Replayer(replay, name)
            elif record is not None:
                runner = Recorder(record, name, run_tool)
            else:
                runner = run_tool
            v = verify_with_bmc(path, cfg, "transformed", width=width, runner=runner)
            row = SuiteRow(name, expected, v.status, v.seconds, v.precise,
                           categorize(expected, v.status))
        except ParseError as exc:
            row = SuiteRow(name, expected, "parse-error", 0.0, None, "no-result", str(exc))
        except Exception as exc:  # a broken program must not stop the suite
            row = SuiteRow(name, expected, "error", 0.0, None, "no-result", repr(exc))
        with lock:
            report.rows.append(row)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        list(pool.map(one, files))
    report.rows.sort(key=lambda r: r.name)
    return report
