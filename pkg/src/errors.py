"""
Error taxonomy shared by the engine, the oracle, the DSL and the CLI.
"""

from dataclasses import dataclass
from typing import List, Optional


class StatuesError(Exception):
    """Base class for every error raised while building or querying a model."""


class InvalidPmf(StatuesError, ValueError):
    """Weights are empty, negative or all zero."""


class EmptyDistribution(StatuesError):
    """No atom survived the evidence: the condition is impossible."""

    def __init__(self, message: str = "empty distribution (impossible condition)"):
        super().__init__(message)


class NonBooleanCondition(StatuesError, TypeError):
    """A condition node produced a value that is not a boolean."""


class MissingTableEntry(StatuesError, KeyError):
    """A table selector produced a value with no branch."""

    def __str__(self) -> str:
        # KeyError quotes its argument; keep the plain message
        return str(self.args[0]) if self.args else ''


class FunctionError(StatuesError):
    """A pure function failed on one of its argument values."""


class NonFunctionValue(StatuesError, TypeError):
    """A multi-functional selector produced a value that is not a function."""


class InvalidObservation(StatuesError, ValueError):
    """An observation targets a node that cannot be observed."""


class UnknownObservationValue(InvalidObservation):
    """An observed value is outside the node's domain."""


class CapExceeded(StatuesError):
    """The oracle would enumerate more possible worlds than allowed."""


@dataclass(frozen=True)
class Diagnostic:
    """One parser/compiler message with its source span."""
    severity: str
    message: str
    line: int
    column: int
    end_line: int
    end_column: int
    filename: str = '<model>'

    def __str__(self) -> str:
        return f"{self.filename}:{self.line}:{self.column}: {self.severity}: {self.message}"


class DslError(StatuesError):
    """Model source could not be parsed or compiled."""

    def __init__(self, diagnostics: List[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__('\n'.join(str(d) for d in self.diagnostics))

    @property
    def first(self) -> Optional[Diagnostic]:
        return self.diagnostics[0] if self.diagnostics else None
