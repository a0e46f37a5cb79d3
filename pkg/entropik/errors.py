from __future__ import annotations

from typing import Any


class EntropikError(Exception):
    code = "EPK-X000"
    exit_code = 2

    def __init__(self, message: str, **detail: Any) -> None:
        super().__init__(message)
        self.message = message
        self.detail = detail

    def describe(self) -> str:
        return f"error[{self.code}]: {self.message}"


# symbolic kernel
class DivisionByZeroExpr(EntropikError):
    code = "EPK-K001"


class UnknownConstitSym(EntropikError):
    code = "EPK-K002"


class NotPolynomialInVars(EntropikError):
    code = "EPK-K003"


class DenominatorVanishes(EntropikError):
    code = "EPK-K004"


class InvalidModel(EntropikError):
    code = "EPK-M001"
    exit_code = 1


class ParseFailed(EntropikError):
    code = "EPK-P001"
    exit_code = 1

    def __init__(self, message: str, diagnostics: list) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics


# solution set
class NonlinearInLeading(EntropikError):
    code = "EPK-S001"


class SingularSystem(EntropikError):
    code = "EPK-S002"


class OrderCapExceeded(EntropikError):
    code = "EPK-S003"


class SingularConsequence(EntropikError):
    code = "EPK-S004"


class EliminationInexact(EntropikError):
    code = "EPK-S005"


class NotPolynomialInFreeElements(EntropikError):
    code = "EPK-E001"


# mueller-liu
class NonlinearExtendedInequality(EntropikError):
    code = "EPK-L001"


class MultiplierEliminationIncomplete(EntropikError):
    code = "EPK-L002"


class DepthCapExceeded(EntropikError):
    code = "EPK-A001"


# bindings
class UnboundSymbol(EntropikError):
    code = "EPK-B001"
    exit_code = 1


class NonRationalBinding(EntropikError):
    code = "EPK-B002"
    exit_code = 1


class InvalidBinding(EntropikError):
    code = "EPK-B003"
    exit_code = 1


class ConfigError(EntropikError):
    code = "EPK-C001"
    exit_code = 1
