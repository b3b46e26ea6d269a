"""
Binary entropy helpers.

Everything is in nats; `to_bits` converts at reporting boundaries.
0 log 0 is 0, so h(0) = h(1) = 0.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import entr

LN2 = math.log(2.0)

_UPPER = float(np.nextafter(1.0, 0.0))
_LOWER = 1e-300


def binary_entropy(x: ArrayLike) -> NDArray[np.float64]:
    """h(x) = -x ln x - (1-x) ln(1-x), elementwise, in nats."""
    x_arr = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return entr(x_arr) + entr(1.0 - x_arr)


def binary_entropy_deriv(x: ArrayLike) -> NDArray[np.float64]:
    """h'(x) = ln((1-x)/x), elementwise, in nats."""
    x_arr = np.clip(np.asarray(x, dtype=float), _LOWER, _UPPER)
    return np.log1p(-x_arr) - np.log(x_arr)


def to_bits(value_nats):
    return value_nats / LN2


def to_nats(value_bits):
    return value_bits * LN2
