"""
Numeric defaults shared by the whole engine.

Everything that changes a printed number lives here so the provenance
banner can report it. Solver-specific knobs (iterations, restarts, seed)
live in `core.worst.SolverConfig`.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, asdict
from typing import Dict

logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "COLLRATES_THREADS"


@dataclass(frozen=True)
class NumericsConfig:
    tardos_nodes: int = 2001            # midpoint rule in u, p = (1 - cos u)/2
    flat_nodes: int = 501               # Gauss-Legendre on [0, 1]
    expect_tol_bits: float = 1e-10      # declared accuracy of expect()
    theta_tol: float = 1e-9             # channel equality / class tags
    negative_clamp: float = 1e-12       # pointwise rates above -this clamp to 0
    curve_grid: int = 501
    logspace_binom_above: int = 50      # exact integer binomials up to here
    max_c_closed_form: int = 200
    max_c_ba: int = 50
    max_c_simple_bc: int = 15

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


DEFAULT_NUMERICS = NumericsConfig()


def threads(default: int | None = None) -> int:
    """
    Worker cap for per-c sweeps and multistart restarts.

    Reads COLLRATES_THREADS; anything that is not a positive integer is
    ignored with a warning.
    """
    if default is None:
        default = min(8, os.cpu_count() or 1)
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("%s=%r is not an integer; using %d", THREADS_ENV_VAR, raw, default)
        return default
    if value < 1:
        logger.warning("%s=%r must be >= 1; using %d", THREADS_ENV_VAR, raw, default)
        return default
    return value
