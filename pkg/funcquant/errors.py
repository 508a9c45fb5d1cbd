"""Domain errors surfaced by the library and mapped to CLI exit codes."""

from __future__ import annotations

from typing import Optional


class FuncQuantError(Exception):
    exit_code = 1


class InvalidParameterError(FuncQuantError, ValueError):
    exit_code = 4


class UnknownProcessError(FuncQuantError, KeyError):
    exit_code = 3

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class MalformedGridError(FuncQuantError, ValueError):
    exit_code = 5


class ConvergenceError(FuncQuantError):
    exit_code = 6

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual={residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


class BiasBudgetError(FuncQuantError):
    exit_code = 7

    def __init__(self, message: str, required_truncation: Optional[int]):
        suffix = (
            f"; required truncation J={required_truncation}"
            if required_truncation is not None
            else "; no truncation within the search limit meets the budget"
        )
        super().__init__(message + suffix)
        self.required_truncation = required_truncation


class RareEventError(FuncQuantError):
    exit_code = 8

    def __init__(self, message: str, min_feasible_eps: float):
        super().__init__(f"{message}; smallest feasible eps at this sample size ~ {min_feasible_eps:.6g}")
        self.min_feasible_eps = min_feasible_eps


class KernelError(FuncQuantError):
    exit_code = 9


class TranscriptionMismatchError(FuncQuantError):
    exit_code = 10
