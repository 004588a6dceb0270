from .bmc import (
    BMC_ENV, BMC_NAMING, CBMC_PRELUDE, STUB_PRELUDE, BmcConfig, Recorder, Replayer, ToolRun,
    Verdict, classify_output, render_for_bmc, run_tool, verify_with_bmc,
)
from .generator import DEFAULT_WEIGHTS, GenLimits, gen_program
from .suite import (
    CATEGORIES, CSV_HEADER, SuiteReport, SuiteRow, categorize, read_manifest, run_suite,
)

__all__ = [
    "BMC_ENV", "BMC_NAMING", "BmcConfig", "CATEGORIES", "CBMC_PRELUDE", "CSV_HEADER",
    "DEFAULT_WEIGHTS", "GenLimits", "Recorder", "Replayer", "STUB_PRELUDE", "SuiteReport",
    "SuiteRow", "ToolRun", "Verdict", "categorize", "classify_output", "gen_program",
    "read_manifest", "render_for_bmc", "run_suite", "run_tool", "verify_with_bmc",
]
