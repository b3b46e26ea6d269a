"""
Analysis helpers for rate curves and report sets.

- curve_maxima: locations of the local maxima of r(c, p)
- zero_interval: the p range on which a curve vanishes
- check_class_ordering: R_D <= R_C <= R_B <= R_A for matching reports
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike

from .collusion import ClassTag, CollusionChannel
from .reports import RateReport

_ORDER = (ClassTag.D, ClassTag.C, ClassTag.B, ClassTag.A)


def curve_maxima(ps: ArrayLike, rates: ArrayLike, rel_tol: float = 1e-12) -> List[float]:
    """
    Grid points where the curve has a local maximum.

    A flat top spanning several grid points reports its middle point.
    """
    x = np.asarray(ps, dtype=float)
    y = np.asarray(rates, dtype=float)
    tol = rel_tol * max(1.0, float(np.max(np.abs(y))) if y.size else 1.0)
    peaks: List[float] = []
    i = 0
    n = y.size
    while i < n:
        j = i
        while j + 1 < n and abs(y[j + 1] - y[i]) <= tol:
            j += 1
        left_ok = i == 0 or y[i - 1] < y[i] - tol
        right_ok = j == n - 1 or y[j + 1] < y[j] - tol
        # endpoints count only if the curve is not flat there
        interior = i > 0 and j < n - 1
        if left_ok and right_ok and interior:
            peaks.append(float(x[(i + j) // 2]))
        i = j + 1
    return peaks


def zero_interval(ps: ArrayLike, rates: ArrayLike, atol: float = 1e-10) -> Optional[Tuple[float, float]]:
    """Widest run of grid points with |r| <= atol, excluding the endpoints p = 0 and p = 1."""
    x = np.asarray(ps, dtype=float)
    y = np.asarray(rates, dtype=float)
    inner = (x > 0.0) & (x < 1.0) & (np.abs(y) <= atol)
    best: Optional[Tuple[float, float]] = None
    start = None
    for k, flag in enumerate(inner.tolist() + [False]):
        if flag and start is None:
            start = k
        elif not flag and start is not None:
            if best is None or x[k - 1] - x[start] > best[1] - best[0]:
                best = (float(x[start]), float(x[k - 1]))
            start = None
    return best


def classA_divergence(ch: CollusionChannel) -> float:
    """max_s |theta_s - s/c|."""
    ref = np.arange(ch.c + 1) / ch.c
    return float(np.max(np.abs(ch.as_array() - ref)))


def check_class_ordering(reports: Sequence[RateReport], slack: float = 1e-9) -> List[str]:
    """
    Violations of R_D <= R_C <= R_B <= R_A among reports sharing
    (decoder, pdf, c). An empty list means the ordering holds.
    """
    groups: Dict[tuple, Dict[ClassTag, float]] = {}
    for rep in reports:
        key = (rep.decoder, rep.dist.selector(), rep.c)
        groups.setdefault(key, {})[rep.class_tag] = rep.rate_bits

    problems: List[str] = []
    for (decoder, pdf, c), rates in groups.items():
        present = [tag for tag in _ORDER if tag in rates]
        for weaker, stronger in zip(present, present[1:]):
            if rates[weaker] > rates[stronger] + slack:
                problems.append(
                    f"{decoder.value} c={c} pdf={pdf}: R_{weaker.value}={rates[weaker]:.9f} > "
                    f"R_{stronger.value}={rates[stronger]:.9f}"
                )
    return problems
