"""
Collusion channels theta and the laws they induce on the pirated symbol Y.

A stationary channel is the vector theta[s] = Pr(Y=1 | Sigma=s), s = 0..c,
with theta[0] = 0 and theta[c] = 1 (marking assumption). A Class-D strategy
is a rule p -> theta(p).

All probability helpers accept a scalar p or a 1-d array of p values and
return matching shapes; the `*_matrix` helpers return one row per p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import gammaln, xlog1py, xlogy

from .config import DEFAULT_NUMERICS, NumericsConfig
from .errors import CapabilityError, InvalidInputError, StrategyError


class ClassTag(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"


class StrategyKind(str, Enum):
    JOINT_CLOSED_FORM = "joint-closed-form"
    SIMPLE_WORST = "simple-worst"
    CUSTOM = "custom"


# ---------------------------------------------------------------------- #
# Stationary channel
# ---------------------------------------------------------------------- #


@dataclass(frozen=True)
class CollusionChannel:
    c: int
    theta: Tuple[float, ...]
    name: Optional[str] = None

    def __post_init__(self) -> None:
        _check_c(self.c)
        theta = tuple(float(t) for t in self.theta)
        if len(theta) != self.c + 1:
            raise InvalidInputError(
                f"channel for c={self.c} needs {self.c + 1} entries, got {len(theta)}"
            )
        tol = DEFAULT_NUMERICS.theta_tol
        if any(not math.isfinite(t) or t < -tol or t > 1.0 + tol for t in theta):
            raise InvalidInputError(f"channel entries must lie in [0, 1]: {theta}")
        if abs(theta[0]) > tol or abs(theta[-1] - 1.0) > tol:
            raise InvalidInputError(
                f"marking assumption violated: theta[0]={theta[0]}, theta[c]={theta[-1]}"
            )
        snapped = (0.0,) + tuple(min(1.0, max(0.0, t)) for t in theta[1:-1]) + (1.0,)
        object.__setattr__(self, "theta", snapped)

    @classmethod
    def from_interior(cls, interior: ArrayLike, name: Optional[str] = None) -> "CollusionChannel":
        inner = [float(t) for t in np.asarray(interior, dtype=float).ravel()]
        return cls(len(inner) + 1, tuple([0.0] + inner + [1.0]), name)

    def as_array(self) -> NDArray[np.float64]:
        return np.asarray(self.theta, dtype=float)

    @property
    def interior(self) -> NDArray[np.float64]:
        return self.as_array()[1:-1]

    def is_class_a(self, tol: float = DEFAULT_NUMERICS.theta_tol) -> bool:
        ref = np.arange(self.c + 1) / self.c
        return bool(np.max(np.abs(self.as_array() - ref)) <= tol)

    def is_class_b(self, tol: float = DEFAULT_NUMERICS.theta_tol) -> bool:
        th = self.as_array()
        return bool(np.max(np.abs(th - (1.0 - th[::-1]))) <= tol)

    def class_tag(self, tol: float = DEFAULT_NUMERICS.theta_tol) -> ClassTag:
        """Smallest stationary class containing the channel."""
        if self.is_class_a(tol):
            return ClassTag.A
        if self.is_class_b(tol):
            return ClassTag.B
        return ClassTag.C

    def to_text(self, digits: Optional[int] = None) -> str:
        if digits is None:
            return ",".join(repr(t) for t in self.theta)
        return ",".join(f"{t:.{digits}f}" for t in self.theta)


def parse_channel(text: str, c: Optional[int] = None) -> CollusionChannel:
    """
    "0,0.34,0.66,1" or a named attack "<name>" / "<name>:<c>".

    Named attacks: classA, majority, minority, coin-flip, all-ones, all-zeros.
    """
    raw = text.strip()
    if "," in raw:
        try:
            values = tuple(float(v) for v in raw.split(","))
        except ValueError as exc:
            raise InvalidInputError(f"malformed channel {text!r}: {exc}") from exc
        ch = CollusionChannel(len(values) - 1, values)
        if c is not None and ch.c != c:
            raise InvalidInputError(f"channel {text!r} has c={ch.c}, expected {c}")
        return ch

    name, _, c_txt = raw.partition(":")
    if c_txt:
        try:
            c = int(c_txt)
        except ValueError as exc:
            raise InvalidInputError(f"malformed collusion size in {text!r}") from exc
    if c is None:
        raise InvalidInputError(f"named channel {text!r} needs a collusion size")
    factory = NAMED_ATTACKS.get(name.lower())
    if factory is None:
        raise InvalidInputError(
            f"unknown attack {name!r}; known: {', '.join(sorted(NAMED_ATTACKS))}"
        )
    return factory(c)


# ---------------------------------------------------------------------- #
# Class-D strategy
# ---------------------------------------------------------------------- #

ThetaRule = Callable[[NDArray[np.float64]], NDArray[np.float64]]


@dataclass(frozen=True, eq=False)
class ClassDStrategy:
    """
    p-dependent attack.

    `rule` is vectorized: an array of n values of p maps to an (n, c+1)
    array of channel vectors. Use `from_pointwise` to wrap a scalar rule.
    """

    c: int
    rule: ThetaRule
    kind: StrategyKind = StrategyKind.CUSTOM
    name: str = ""

    @classmethod
    def from_pointwise(
        cls,
        c: int,
        fn: Callable[[float], Union[CollusionChannel, Sequence[float]]],
        name: str = "",
    ) -> "ClassDStrategy":
        def rule(ps: NDArray[np.float64]) -> NDArray[np.float64]:
            rows = []
            for p in np.atleast_1d(ps):
                out = fn(float(p))
                rows.append(out.theta if isinstance(out, CollusionChannel) else tuple(out))
            return np.asarray(rows, dtype=float).reshape(-1, c + 1)

        return cls(c, rule, StrategyKind.CUSTOM, name)

    def thetas(self, ps: ArrayLike) -> NDArray[np.float64]:
        """Evaluate the rule and enforce the channel invariants at every p."""
        ps_arr = np.atleast_1d(np.asarray(ps, dtype=float))
        try:
            out = np.asarray(self.rule(ps_arr), dtype=float)
        except (ArithmeticError, ValueError) as exc:
            raise StrategyError(f"strategy undefined on the requested p values: {exc}") from exc
        if out.shape != (ps_arr.size, self.c + 1):
            raise StrategyError(
                f"strategy returned shape {out.shape}, expected {(ps_arr.size, self.c + 1)}"
            )
        tol = DEFAULT_NUMERICS.theta_tol
        bad = (
            ~np.all(np.isfinite(out), axis=1)
            | np.any(out < -tol, axis=1)
            | np.any(out > 1.0 + tol, axis=1)
            | (np.abs(out[:, 0]) > tol)
            | (np.abs(out[:, -1] - 1.0) > tol)
        )
        if bad.any():
            p_bad = float(ps_arr[np.argmax(bad)])
            raise StrategyError(f"strategy undefined at p={p_bad!r}", {"p": p_bad})
        out = np.clip(out, 0.0, 1.0)
        out[:, 0] = 0.0
        out[:, -1] = 1.0
        return out

    def channel_at(self, p: float) -> CollusionChannel:
        return CollusionChannel(self.c, tuple(self.thetas([p])[0]), self.name or None)


# ---------------------------------------------------------------------- #
# Named attacks
# ---------------------------------------------------------------------- #


def _check_c(c: int, numerics: NumericsConfig = DEFAULT_NUMERICS) -> None:
    if not isinstance(c, (int, np.integer)) or c < 1:
        raise InvalidInputError(f"invalid collusion size c={c!r}")
    if c > numerics.max_c_closed_form:
        raise CapabilityError(f"collusion size c={c} above the cap {numerics.max_c_closed_form}")


def classA(c: int) -> CollusionChannel:
    """Blind assignation: copy a random colluder, theta[s] = s/c."""
    _check_c(c)
    return CollusionChannel(c, tuple(s / c for s in range(c + 1)), "classA")


def _from_rule(c: int, name: str, pick: Callable[[int], float]) -> CollusionChannel:
    _check_c(c)
    inner = [pick(s) for s in range(1, c)]
    return CollusionChannel(c, tuple([0.0] + inner + [1.0]), name)


def majority(c: int) -> CollusionChannel:
    return _from_rule(c, "majority", lambda s: 1.0 if 2 * s > c else (0.5 if 2 * s == c else 0.0))


def minority(c: int) -> CollusionChannel:
    return _from_rule(c, "minority", lambda s: 1.0 if 2 * s < c else (0.5 if 2 * s == c else 0.0))


def coin_flip(c: int) -> CollusionChannel:
    return _from_rule(c, "coin-flip", lambda s: 0.5)


def all_ones(c: int) -> CollusionChannel:
    return _from_rule(c, "all-ones", lambda s: 1.0)


def all_zeros(c: int) -> CollusionChannel:
    return _from_rule(c, "all-zeros", lambda s: 0.0)


NAMED_ATTACKS = {
    "classa": classA,
    "majority": majority,
    "minority": minority,
    "coin-flip": coin_flip,
    "all-ones": all_ones,
    "all-zeros": all_zeros,
}


# ---------------------------------------------------------------------- #
# Bernstein tables
# ---------------------------------------------------------------------- #


def bernstein_matrix(
    c: int,
    ps: ArrayLike,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
) -> NDArray[np.float64]:
    """
    Rows: p values. Columns: Pr(Sigma = s | P = p) = C(c,s) p^s (1-p)^(c-s).

    Exact integer binomials up to the configured threshold, log-space above.
    """
    if c < 0:
        raise InvalidInputError(f"invalid collusion size c={c!r}")
    if c > numerics.max_c_closed_form:
        raise CapabilityError(f"collusion size c={c} above the cap {numerics.max_c_closed_form}")
    p = np.atleast_1d(np.asarray(ps, dtype=float))[:, None]
    s = np.arange(c + 1, dtype=float)[None, :]
    if c <= numerics.logspace_binom_above:
        coef = np.array([math.comb(c, k) for k in range(c + 1)], dtype=float)[None, :]
        return coef * np.power(p, s) * np.power(1.0 - p, c - s)
    log_coef = gammaln(c + 1.0) - gammaln(s + 1.0) - gammaln(c - s + 1.0)
    return np.exp(log_coef + xlogy(s, p) + xlog1py(c - s, -p))


def conditional_matrices(
    c: int,
    ps: ArrayLike,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    (Q1, Q0) with theta @ Q1[i] = Pr(Y=1 | X=1, p_i) and likewise for X=0.

    Q1[:, k] = C(c-1, k-1) p^(k-1) (1-p)^(c-k) for k >= 1, and
    Q0[:, k] = C(c-1, k) p^k (1-p)^(c-1-k) for k <= c-1.
    """
    reduced = bernstein_matrix(c - 1, ps, numerics)
    zeros = np.zeros((reduced.shape[0], 1))
    return np.hstack([zeros, reduced]), np.hstack([reduced, zeros])


def bernstein(c: int, sigma: int, p: ArrayLike):
    if not (0 <= sigma <= c):
        raise InvalidInputError(f"invalid sigma={sigma} for c={c}")
    col = bernstein_matrix(c, p)[:, sigma]
    return float(col[0]) if np.ndim(p) == 0 else col


def _theta_of(ch: Union[CollusionChannel, ArrayLike]) -> NDArray[np.float64]:
    if isinstance(ch, CollusionChannel):
        return ch.as_array()
    return np.asarray(ch, dtype=float)


def _shape_like(values: NDArray[np.float64], p: ArrayLike):
    return float(values[0]) if np.ndim(p) == 0 else values


def prob_y1(ch: CollusionChannel, p: ArrayLike):
    """Pr(Y=1 | P=p) = sum_s theta[s] Pr(Sigma=s | p)."""
    theta = _theta_of(ch)
    return _shape_like(bernstein_matrix(theta.size - 1, p) @ theta, p)


def prob_y1_given_x(ch: CollusionChannel, x: int, p: ArrayLike):
    """Pr(Y=1 | X=x, P=p) for the symbol x of one colluder."""
    if x not in (0, 1):
        raise InvalidInputError(f"x must be a bit, got {x!r}")
    theta = _theta_of(ch)
    q1, q0 = conditional_matrices(theta.size - 1, p)
    return _shape_like((q1 if x == 1 else q0) @ theta, p)


def dprob_y1(ch: CollusionChannel, p: ArrayLike):
    """d/dp Pr(Y=1 | P=p) = c sum_s (theta[s+1] - theta[s]) C(c-1,s) p^s (1-p)^(c-1-s)."""
    theta = _theta_of(ch)
    c = theta.size - 1
    return _shape_like(c * (bernstein_matrix(c - 1, p) @ np.diff(theta)), p)


def q_vectors(c: int, p: float) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """The q_Sigma1 / q_Sigma0 component vectors at one p."""
    q1, q0 = conditional_matrices(c, [p])
    return q1[0], q0[0]


def scalar_rho(c: int, i: int, p: float) -> float:
    """
    rho_i(p) = C(c,i) p^(i-1) (1-p)^(c-i-1) (i/c - p), negative iff p > i/c.

    Evaluated as q1_i - q0_i so that i = c and p near 0 or 1 stay finite.
    """
    if not (1 <= i <= c):
        raise InvalidInputError(f"invalid index i={i} for c={c}")
    q1, q0 = q_vectors(c, p)
    return float(q1[i] - q0[i])


def j_value(ch: CollusionChannel, p: float) -> float:
    """J(theta, p) = theta . (q1 - q0); zero on the null-rate hyperplane."""
    q1, q0 = q_vectors(ch.c, p)
    return float(ch.as_array() @ (q1 - q0))


def j_value_rho(ch: CollusionChannel, p: float) -> float:
    """J(theta, p) = rho_c(p) + sum_{i<c} theta_i rho_i(p)."""
    total = scalar_rho(ch.c, ch.c, p)
    for i in range(1, ch.c):
        total += ch.theta[i] * scalar_rho(ch.c, i, p)
    return total
