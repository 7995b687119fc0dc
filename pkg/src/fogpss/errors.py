"""Exception types shared across the package."""

from __future__ import annotations


class BlowUpError(ArithmeticError):
    """A state or control value became non-finite."""

    def __init__(self, message: str, t: float | None = None, step: int | None = None):
        parts = []
        if step is not None:
            parts.append(f"step {step}")
        if t is not None:
            parts.append(f"t={t:.6g}")
        super().__init__(f"{message} ({', '.join(parts)})" if parts else message)
        self.t = t
        self.step = step


class AssumptionViolation(ValueError):
    """A modelling bound failed during configuration or simulation.

    ``assumption`` names the bound family: ``"reference bounds"``,
    ``"plant bounds"`` or ``"measurement bounds"``.
    """

    def __init__(self, assumption: str, message: str, t: float | None = None, value: float | None = None):
        where = f" at t={t:.6g}" if t is not None else ""
        super().__init__(f"{assumption} violated{where}: {message}")
        self.assumption = assumption
        self.t = t
        self.value = value


class GainConditionError(ValueError):
    """Controller gains fail the strict inequality required for practical tracking."""
