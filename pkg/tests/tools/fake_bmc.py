"""Stand-in verifier for harness tests: enumerates the transformed program
with the oracle and prints CBMC-style result markers."""
import sys
from pathlib import Path

from arraywitness.frontend import parse
from arraywitness.harness import BMC_NAMING
from arraywitness.oracle import NdPolicy, enumerate_transformed, program_constants

text = Path(sys.argv[1]).read_text()
program = parse(text, transformed=True, naming=BMC_NAMING)
policy = NdPolicy(frozenset(program_constants(program) | {0, 1, 2, 3}), cap=16)
failed = False
for d in (0, 1):
    en = enumerate_transformed(program, policy, x_default=d, stop=lambda o: bool(o.failed))
    failed = failed or en.any_failure() is not None
print("VERIFICATION FAILED" if failed else "VERIFICATION SUCCESSFUL")
