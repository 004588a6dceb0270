from .emit import emit, emit_expr, emit_stmt
from .errors import Diagnostic, ParseError
from .parser import DEFAULT_NAMING, NdNaming, parse
from .typecheck import decl_map, expr_type, lval_type
from .validate import ConformanceReport, Violation, validate_transformed

__all__ = [
    "ConformanceReport", "DEFAULT_NAMING", "Diagnostic", "NdNaming", "ParseError",
    "Violation", "decl_map", "emit", "emit_expr", "emit_stmt", "expr_type", "lval_type",
    "parse", "validate_transformed",
]
