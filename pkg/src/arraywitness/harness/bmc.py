"""Drive an external bounded model checker on original or transformed programs."""
from __future__ import annotations

import json
import os
import shlex
import signal
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from ..analysis import classify_precision
from ..frontend import NdNaming, emit, parse
from ..transform import TransformConfig, transform_program

PLACEHOLDER = "{file}"
BMC_ENV = "WITNESS_BMC"

# nd helpers for verifiers that follow the nondet/assume convention
CBMC_PRELUDE = """\
#include <assert.h>
extern int __VERIFIER_nondet_int(void);
extern void __CPROVER_assume(_Bool);
static int nd(void) { return __VERIFIER_nondet_int(); }
static int nd_range(int lo, int hi)
{
  int v = __VERIFIER_nondet_int();
  __CPROVER_assume(lo <= v && v <= hi);
  return v;
}
"""

# for plain compilation only; never used to produce verdicts
STUB_PRELUDE = """\
#include <assert.h>
#include <stdlib.h>
static int nd(void) { return rand(); }
static int nd_range(int lo, int hi) { return lo + (int)((unsigned)rand() % (unsigned)(hi - lo + 1)); }
"""

BMC_NAMING = NdNaming(nd="nd", nd_range="nd_range")


@dataclass(frozen=True)
class BmcConfig:
    command: tuple = ("cbmc", PLACEHOLDER)
    timeout: float = 60.0
    success_markers: tuple = ("VERIFICATION SUCCESSFUL",)
    failure_markers: tuple = ("VERIFICATION FAILED",)
    prelude: str = CBMC_PRELUDE
    grace: float = 2.0

    def __post_init__(self):
        holders = sum(arg.count(PLACEHOLDER) for arg in self.command)
        if holders != 1:
            raise ValueError(f"command must contain {PLACEHOLDER} exactly once")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    @classmethod
    def from_string(cls, command: str, **kw) -> "BmcConfig":
        return cls(command=tuple(shlex.split(command)), **kw)

    @classmethod
    def from_env(cls, **kw) -> Optional["BmcConfig"]:
        cmd = os.environ.get(BMC_ENV)
        return cls.from_string(cmd, **kw) if cmd else None

    def argv(self, path: str) -> list[str]:
        return [a.replace(PLACEHOLDER, path) for a in self.command]


@dataclass
class ToolRun:
    returncode: Optional[int]
    output: str
    seconds: float
    timed_out: bool = False
    missing: bool = False

    def to_dict(self) -> dict:
        return {"returncode": self.returncode, "output": self.output, "seconds": self.seconds,
                "timed_out": self.timed_out, "missing": self.missing}


def run_tool(argv: list[str], timeout: float, grace: float = 2.0) -> ToolRun:
    """Run in a fresh process group so the whole tree can be killed on timeout."""
    start = time.monotonic()
    try:
        proc = subprocess.Popen(argv, stdout=subprocess.PIPE, stderr=subprocess.STDOUT,
                                text=True, start_new_session=True)
    except (FileNotFoundError, PermissionError) as exc:
        return ToolRun(None, str(exc), time.monotonic() - start, missing=True)
    try:
        out, _ = proc.communicate(timeout=timeout)
        return ToolRun(proc.returncode, out, time.monotonic() - start)
    except subprocess.TimeoutExpired:
        _kill_group(proc, signal.SIGTERM)
        try:
            out, _ = proc.communicate(timeout=grace)
        except subprocess.TimeoutExpired:
            _kill_group(proc, signal.SIGKILL)
            out, _ = proc.communicate()
        return ToolRun(proc.returncode, out or "", time.monotonic() - start, timed_out=True)


def _kill_group(proc, sig) -> None:
    try:
        os.killpg(proc.pid, sig)
    except ProcessLookupError:
        pass


Runner = Callable[[list, float, float], ToolRun]


@dataclass
class Verdict:
    status: str  # 'safe' | 'unsafe' | 'timeout' | 'tool-error'
    seconds: float
    precise: bool  # every assertion qualifies, so an unsafe verdict is trustworthy
    mode: str = "transformed"
    output: str = field(default="", repr=False)

    @property
    def confirmed(self) -> bool:
        """An unsafe verdict is confirmed for the original only when precise;
        a safe verdict always carries over."""
        return self.status == "safe" or (self.status == "unsafe" and self.precise)

    def to_dict(self) -> dict:
        return {"status": self.status, "seconds": round(self.seconds, 3), "precise": self.precise,
                "confirmed": self.confirmed, "mode": self.mode}


def classify_output(run: ToolRun, cfg: BmcConfig) -> str:
    if run.timed_out:
        return "timeout"
    if run.missing:
        return "tool-error"
    if any(m in run.output for m in cfg.failure_markers):
        return "unsafe"
    if any(m in run.output for m in cfg.success_markers):
        return "safe"
    return "tool-error"


def render_for_bmc(source: str, cfg: BmcConfig, mode: str, width: int = 32) -> tuple[str, bool]:
    """The C text handed to the tool and the precision flag of the original."""
    original = parse(source, int_width=width)
    precise = classify_precision(original).all_qualify
    if mode == "original":
        return emit(original, prelude="#include <assert.h>\n"), precise
    if mode != "transformed":
        raise ValueError(f"unknown mode {mode!r}")
    transformed, _ = transform_program(original, TransformConfig(naming=BMC_NAMING, int_width=width))
    return emit(transformed, BMC_NAMING, prelude=cfg.prelude), precise


def verify_with_bmc(file, cfg: BmcConfig, mode: str = "transformed", *, width: int = 32,
                    runner: Optional[Runner] = None) -> Verdict:
    """Verify the program in ``file`` (an original program). In transformed
    mode the witness transformation is applied first."""
    text, precise = render_for_bmc(Path(file).read_text(), cfg, mode, width)
    with tempfile.TemporaryDirectory(prefix="witness-bmc-") as tmp:
        path = os.path.join(tmp, Path(file).stem + ".c")
        Path(path).write_text(text)
        run = (runner or run_tool)(cfg.argv(path), cfg.timeout, cfg.grace)
    return Verdict(classify_output(run, cfg), run.seconds, precise, mode, run.output)


class Recorder:
    """Runner wrapper that stores every tool run as JSON, keyed by program."""

    def __init__(self, directory, key: str, inner: Runner = run_tool):
        self.path = Path(directory) / f"{key}.json"
        self.inner = inner

    def __call__(self, argv, timeout, grace) -> ToolRun:
        run = self.inner(argv, timeout, grace)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(json.dumps(run.to_dict(), indent=2, sort_keys=True))
        return run


class Replayer:
    """Runner that returns a previously recorded tool run."""

    def __init__(self, directory, key: str):
        self.path = Path(directory) / f"{key}.json"

    def __call__(self, argv, timeout, grace) -> ToolRun:
        if not self.path.exists():
            return ToolRun(None, f"no recording at {self.path}", 0.0, missing=True)
        d = json.loads(self.path.read_text())
        return ToolRun(d["returncode"], d["output"], d["seconds"], d["timed_out"], d["missing"])
