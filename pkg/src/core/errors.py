"""
Exception hierarchy for the rate engine.

All errors raised on purpose derive from CollRatesError so the CLI can map
them to exit codes. Errors that mean "a proven property failed numerically"
are InternalInvariantError: they point at a bug, not at bad input.
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class CollRatesError(RuntimeError):
    """Base class for errors raised by collrates."""

    def __init__(self, message: str, payload: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.payload: Dict[str, Any] = dict(payload or {})


class InvalidInputError(CollRatesError, ValueError):
    """Bad user input: selector strings, channel vectors, sizes, endpoints."""


class IntegrandError(CollRatesError):
    pass


class StrategyError(CollRatesError):
    pass


class DegenerateUpdateError(CollRatesError):
    pass


class ConvergenceError(CollRatesError):
    """
    A solver ran out of iterations (or every restart stalled).

    `last_gap_bits` and `iterations` are always set; the multistart solver
    also attaches its best-so-far channel under payload["best_theta"].
    """

    def __init__(
        self,
        message: str,
        last_gap_bits: float,
        iterations: int,
        payload: Optional[Dict[str, Any]] = None,
    ) -> None:
        super().__init__(message, payload)
        self.last_gap_bits = last_gap_bits
        self.iterations = iterations


class CapabilityError(CollRatesError):
    """Request beyond a solver's supported range (e.g. simple B/C with c > 15)."""


class InternalInvariantError(CollRatesError, AssertionError):
    pass


EXIT_OK = 0
EXIT_INVALID_CONFIG = 2
EXIT_NO_CONVERGENCE = 3
EXIT_CAPABILITY = 4


def exit_code_for(exc: BaseException) -> Optional[int]:
    """Exit code for a known error, or None to let it propagate."""
    if isinstance(exc, CapabilityError):
        return EXIT_CAPABILITY
    if isinstance(exc, (ConvergenceError, DegenerateUpdateError)):
        return EXIT_NO_CONVERGENCE
    if isinstance(exc, InvalidInputError):
        return EXIT_INVALID_CONFIG
    return None
