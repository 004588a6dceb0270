from .dataflow import Dataflow, analyze_dataflow, iterator_live_after
from .loops import (
    ArrayInfo, LoopFacts, ModSet, analyze_loops, array_inventory, exit_value,
    fullarrayaccess, lastof, loopbound, loopdefs, loops_of, static_range,
)
from .precision import RULES, AssertionPrecision, PrecisionReport, classify_precision

__all__ = [
    "ArrayInfo", "AssertionPrecision", "Dataflow", "LoopFacts", "ModSet",
    "PrecisionReport", "RULES", "analyze_dataflow", "analyze_loops",
    "array_inventory", "classify_precision", "exit_value", "fullarrayaccess",
    "iterator_live_after", "lastof", "loopbound", "loopdefs", "loops_of",
    "static_range",
]
