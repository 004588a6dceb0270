"""Command-line entry point.

Exit codes: 0 success, 1 property violation / unsafe or unestablished
verdict, 2 usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import __version__
from .analysis import analyze_loops, classify_precision
from .frontend import DEFAULT_NAMING, NdNaming, ParseError, emit, parse
from .harness import BMC_ENV, BmcConfig, GenLimits, gen_program, read_manifest, run_suite
from .harness.bmc import BMC_NAMING, verify_with_bmc
from .oracle import NdPolicy, check_precision_empirical, check_represents, check_soundness
from .oracle.checks import run_original
from .transform import TransformConfig, transform_program


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    command: str
    int_width: int = 32
    verbose: bool = False


def _read_program(path: str, width: int):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return parse(p.read_text(), int_width=width)


def _write(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _naming(prefix: Optional[str]) -> NdNaming:
    if not prefix:
        return DEFAULT_NAMING
    return NdNaming(nd=prefix, nd_range=f"{prefix}_range")


# -- transform --------------------------------------------------------------

def cmd_transform(args, cfg: CliConfig) -> int:
    program = _read_program(args.input, cfg.int_width)
    naming = BMC_NAMING if args.bmc_prelude and not args.nd_prefix else _naming(args.nd_prefix)
    out, report = transform_program(program, TransformConfig(naming=naming, int_width=cfg.int_width))
    prelude = BmcConfig().prelude if args.bmc_prelude else ""
    _write(args.output, emit(out, naming, prelude=prelude))
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    return 0


# -- facts ------------------------------------------------------------------

def facts_document(program) -> dict:
    loops = sorted(analyze_loops(program).values(), key=lambda f: f.index)
    report = classify_precision(program)
    return {
        "loops": [
            {
                "loop": f"L{f.index}",
                "line": f.span.line if f.span else None,
                "iterator": f.iterator,
                "range": [f.lower, f.upper] if f.lower is not None else None,
                "rule": f.rule,
                "anchor": f.anchor,
                "fullarrayaccess": dict(f.full_access),
                "loopdefs": sorted(f.defs.scalars | f.defs.arrays),
                "exit": f.exit,
                "parent": f"L{f.parent}" if f.parent else None,
            }
            for f in loops
        ],
        "assertions": [
            {
                "assertion": f"A{a.index}",
                "line": a.span.line if a.span else None,
                "in_loop": a.in_loop,
                "qualifies": a.qualifies,
                "violated": sorted(a.violated_rules),
                "relaxation": a.relaxation_applied,
                "s_def": [f"L{n}" for n in a.contributing_loops],
                "assert_loop": f"L{a.assert_loop}" if a.assert_loop else None,
                "v_imp": sorted(a.v_imp),
                "e_imp": list(a.e_imp),
                "reasons": list(a.reasons),
            }
            for a in report
        ],
    }


def _kv(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, dict):
        return ",".join(f"{k}={_kv(v)}" for k, v in value.items()) or "-"
    if isinstance(value, list):
        if len(value) == 2 and all(isinstance(v, int) for v in value):
            return f"{value[0]}..{value[1]}"
        return ",".join(str(v) for v in value) or "-"
    return str(value)


def facts_text(doc: dict) -> str:
    lines = []
    for group, head in (("loops", "loop"), ("assertions", "assertion")):
        for rec in doc[group]:
            lines.append(f"{head}: {rec[head]}")
            for k, v in rec.items():
                if k == head:
                    continue
                if k == "reasons":
                    lines.extend(f"  reason: {r}" for r in v)
                    continue
                lines.append(f"  {k}: {_kv(v)}")
    return "\n".join(lines) + "\n"


def cmd_facts(args, cfg: CliConfig) -> int:
    doc = facts_document(_read_program(args.input, cfg.int_width))
    _write(args.output, json.dumps(doc, indent=2) + "\n" if args.json else facts_text(doc))
    return 0


# -- oracle -----------------------------------------------------------------

def cmd_oracle(args, cfg: CliConfig) -> int:
    if args.file:
        program = _read_program(args.file, cfg.int_width)
        name = Path(args.file).stem
    elif args.seed is not None:
        program = gen_program(GenLimits(seed=args.seed))
        name = f"gen_{args.seed}"
    else:
        raise UsageError("oracle needs a program file or --seed")
    policy = NdPolicy(cap=args.cap)
    common = dict(fuel=args.fuel, max_execs=args.max_execs, width=cfg.int_width)
    if args.property == "soundness":
        v = check_soundness(program, policy, **common)
    elif args.property == "precision":
        v = check_precision_empirical(program, policy, **common)
    else:
        v = check_represents(program, policy, mode=args.mode, **common)
    doc = v.to_dict()
    doc["program"] = name
    _write(args.output, json.dumps(doc, indent=2) + "\n")
    if v.counterexample is not None and args.cx_dir:
        d = Path(args.cx_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{name}.c").write_text(v.counterexample.program)
        (d / f"{name}.nd.json").write_text(json.dumps(v.counterexample.to_dict(), indent=2) + "\n")
    if v.status == "violated":
        print(f"{args.property} violated: {v.detail}", file=sys.stderr)
        return 1
    if v.status == "inconclusive":
        print(f"{args.property} inconclusive: {v.detail}", file=sys.stderr)
        return 1
    if v.status == "out-of-class":
        print(f"{args.property} skipped: {v.detail}", file=sys.stderr)
    return 0


# -- bmc --------------------------------------------------------------------

def _bmc_config(args) -> BmcConfig:
    cmd = args.bmc or os.environ.get(BMC_ENV)
    if not cmd:
        if getattr(args, "replay", None):
            cmd = "replay {file}"
        else:
            raise UsageError(f"no model checker configured: pass --bmc or set {BMC_ENV}")
    try:
        return BmcConfig.from_string(cmd, timeout=args.timeout)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_verify(args, cfg: CliConfig) -> int:
    if not Path(args.input).is_file():
        raise UsageError(f"no such file: {args.input}")
    v = verify_with_bmc(args.input, _bmc_config(args), args.mode, width=cfg.int_width)
    _write(args.output, json.dumps(v.to_dict(), indent=2) + "\n")
    return 0 if v.status == "safe" else 1


def cmd_suite(args, cfg: CliConfig) -> int:
    if not Path(args.directory).is_dir():
        raise UsageError(f"no such directory: {args.directory}")
    bmc = _bmc_config(args)
    expect = read_manifest(args.expect) if args.expect else None
    report = run_suite(args.directory, bmc, expect, workers=args.workers, replay=args.replay,
                       record=args.record, use_oracle=not args.no_oracle, width=cfg.int_width)
    if args.out:
        report.write(args.out)
    else:
        sys.stdout.write(report.to_csv())
    counts = report.counts
    print(" ".join(f"{k}={v}" for k, v in counts.items()), file=sys.stderr)
    return 1 if counts["incorrect-true"] or counts["incorrect-false"] else 0


# -- gen --------------------------------------------------------------------

def cmd_gen(args, cfg: CliConfig) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    for seed in range(args.seed, args.seed + args.count):
        limits = GenLimits(max_size=args.max_size, max_bound=args.max_bound,
                           max_stmts=args.max_stmts, seed=seed)
        program = gen_program(limits)
        name = f"gen_{seed:06d}"
        (out / f"{name}.c").write_text(emit(program))
        o = run_original(program)
        if o.status in ("pass", "fail"):
            manifest.append(f"{name} {'safe' if o.status == 'pass' else 'unsafe'}")
    (out / "expected.txt").write_text("\n".join(manifest) + "\n")
    return 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arraywitness",
                                description="Witness-index transformation for array programs.")
    p.add_argument("--version", action="version", version=f"arraywitness {__version__}")
    p.add_argument("--int-width", type=int, default=32, help="width of int in bits")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command")

    t = sub.add_parser("transform", help="rewrite a program into array-free, loop-free form")
    t.add_argument("input")
    t.add_argument("-o", "--output")
    t.add_argument("--nd-prefix", help="name for nd(); nd(l,u) becomes NAME_range")
    t.add_argument("--report", help="write per-rule counts as JSON here")
    t.add_argument("--bmc-prelude", action="store_true",
                   help="prepend nondet helper definitions for a model checker")
    t.set_defaults(func=cmd_transform)

    f = sub.add_parser("facts", help="dump loop facts and precision classification")
    f.add_argument("input")
    f.add_argument("--json", action="store_true")
    f.add_argument("-o", "--output")
    f.set_defaults(func=cmd_facts)

    o = sub.add_parser("oracle", help="differential checks by exhaustive enumeration")
    o.add_argument("property", choices=("soundness", "precision", "represents"))
    o.add_argument("file", nargs="?")
    o.add_argument("--seed", type=int, help="check a generated program instead of a file")
    o.add_argument("--cap", type=int, default=64, help="largest nd(l,u) range enumerated in full")
    o.add_argument("--fuel", type=int, default=1_000_000, help="loop-iteration budget")
    o.add_argument("--max-execs", type=int, default=100_000)
    o.add_argument("--mode", choices=("exempt", "strict"), default="exempt")
    o.add_argument("--cx-dir", help="write counterexamples here")
    o.add_argument("-o", "--output")
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="run the model checker on one program")
    v.add_argument("input")
    v.add_argument("--mode", choices=("transformed", "original"), default="transformed")
    v.add_argument("--bmc", help='command template, e.g. "cbmc {file}"')
    v.add_argument("--timeout", type=float, default=60.0)
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("suite", help="verify a directory of programs")
    s.add_argument("directory")
    s.add_argument("--bmc", help='command template, e.g. "cbmc {file}"')
    s.add_argument("--timeout", type=float, default=60.0)
    s.add_argument("--expect", help="manifest of '<name> safe|unsafe' lines")
    s.add_argument("--out", help="report path (.csv or .json)")
    s.add_argument("--replay", help="directory of recorded tool outputs")
    s.add_argument("--record", help="record tool outputs into this directory")
    s.add_argument("--workers", type=int, default=4)
    s.add_argument("--no-oracle", action="store_true",
                   help="do not derive missing expectations by running the original")
    s.set_defaults(func=cmd_suite)

    g = sub.add_parser("gen", help="write random programs and an expectation manifest")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=10)
    g.add_argument("--out", required=True)
    g.add_argument("--max-size", type=int, default=4)
    g.add_argument("--max-bound", type=int, default=4)
    g.add_argument("--max-stmts", type=int, default=12)
    g.set_defaults(func=cmd_gen)
    return p


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2
    cfg = CliConfig(args.command, args.int_width, args.verbose)
    try:
        return args.func(args, cfg)
    except ParseError as exc:
        for d in exc.diagnostics:
            print(f"{d.span or '?'}: {d.kind} error: {d.message}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
