from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

Severity = Literal["error", "warning"]

SYNTAX = "EPK-D001"
UNKNOWN_IDENTIFIER = "EPK-D002"
DUPLICATE = "EPK-D003"
REQUIRED_LINE = "EPK-D004"
ARITY = "EPK-D005"
INVALID_LEADING = "EPK-D006"
INVALID_DECLARATION = "EPK-D007"


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    col_start: int
    col_end: int

    def __post_init__(self) -> None:
        if self.line < 1 or self.col_start > self.col_end:
            raise ValueError(f"invalid source span {self.line}:{self.col_start}-{self.col_end}")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col_start}"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Severity
    message: str
    span: SourceSpan
    code: str = SYNTAX
    hint: str | None = None

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def describe(self) -> str:
        text = f"{self.span}: {self.severity}[{self.code}]: {self.message}"
        if self.hint:
            text += f" (hint: {self.hint})"
        return text


def error(message: str, span: SourceSpan, code: str = SYNTAX, hint: str | None = None) -> ParseDiagnostic:
    return ParseDiagnostic("error", message, span, code, hint)


def warning(message: str, span: SourceSpan, code: str = SYNTAX, hint: str | None = None) -> ParseDiagnostic:
    return ParseDiagnostic("warning", message, span, code, hint)
