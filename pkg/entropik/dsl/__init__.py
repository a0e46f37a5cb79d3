from entropik.dsl.bindings import Bindings, load_bindings, parse_bindings, resolve_bindings
from entropik.dsl.diagnostics import ParseDiagnostic, SourceSpan
from entropik.dsl.formatter import Printer, fingerprint, format_model, jet_name
from entropik.dsl.parser import ParseResult, Scope, load_model, parse_expression, parse_model, resolve_model

__all__ = [
    "Bindings",
    "ParseDiagnostic",
    "ParseResult",
    "Printer",
    "Scope",
    "SourceSpan",
    "fingerprint",
    "format_model",
    "jet_name",
    "load_bindings",
    "load_model",
    "parse_bindings",
    "parse_expression",
    "parse_model",
    "resolve_bindings",
    "resolve_model",
]
