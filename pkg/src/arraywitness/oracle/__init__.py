from .checks import (
    Counterexample, DiffVerdict, Enumeration, check_precision_empirical,
    check_represents, check_soundness, enumerate_transformed, replay, run_original,
)
from .interp import Compiled, Havoc, Outcome, RuntimeFault
from .policy import NdPolicy, program_constants

__all__ = [
    "Compiled", "Counterexample", "DiffVerdict", "Enumeration", "Havoc", "NdPolicy",
    "Outcome", "RuntimeFault", "check_precision_empirical", "check_represents",
    "check_soundness", "enumerate_transformed", "program_constants", "replay",
    "run_original",
]
