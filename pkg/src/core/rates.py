"""
Pointwise rates r(c, p) and expected achievable rates R for both decoders.

Joint decoder:   r = I(Y; X_C | P=p) / c
                   = (1/c) [h(Pr(Y=1|p)) - sum_s Pr(s|p) h(theta_s)]
Simple decoder:  r = I(Y; X | P=p)
                   = h(Pr(Y=1|p)) - p h(Pr(Y=1|X=1,p)) - (1-p) h(Pr(Y=1|X=0,p))

Internals work in nats; every public function returns bits.

`RateTables` holds the Bernstein tables of one (c, dist) pair on the
quadrature nodes. Solvers reuse one instance across iterations.
"""

from __future__ import annotations

import logging
import math
from enum import Enum
from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import gammaln, rel_entr

from .collusion import (
    ClassDStrategy,
    CollusionChannel,
    bernstein_matrix,
    conditional_matrices,
)
from .config import DEFAULT_NUMERICS, NumericsConfig
from .entropy import binary_entropy, binary_entropy_deriv, to_bits
from .errors import InvalidInputError
from .timeshare import DistKind, TimeSharingDist, expect, quadrature_rule

logger = logging.getLogger(__name__)


class Decoder(str, Enum):
    JOINT = "joint"
    SIMPLE = "simple"


# ---------------------------------------------------------------------- #
# Vectorized pointwise kernels (nats)
# ---------------------------------------------------------------------- #


def _clamp(values: NDArray[np.float64], numerics: NumericsConfig) -> NDArray[np.float64]:
    low = float(np.min(values)) if values.size else 0.0
    if low < -numerics.negative_clamp:
        logger.warning("pointwise rate %.3e below zero beyond round-off; clamped", low)
    return np.maximum(values, 0.0)


def joint_point_nats(
    thetas: NDArray[np.float64],
    ps: NDArray[np.float64],
    numerics: NumericsConfig = DEFAULT_NUMERICS,
) -> NDArray[np.float64]:
    """`thetas` is (c+1,) or (n, c+1); `ps` is (n,)."""
    thetas = np.atleast_1d(thetas)
    c = thetas.shape[-1] - 1
    bern = bernstein_matrix(c, ps, numerics)
    q = np.sum(bern * thetas, axis=-1)
    cond = np.sum(bern * binary_entropy(thetas), axis=-1)
    return _clamp((binary_entropy(q) - cond) / c, numerics)


def simple_point_nats(
    thetas: NDArray[np.float64],
    ps: NDArray[np.float64],
    numerics: NumericsConfig = DEFAULT_NUMERICS,
) -> NDArray[np.float64]:
    thetas = np.atleast_1d(thetas)
    c = thetas.shape[-1] - 1
    ps = np.atleast_1d(np.asarray(ps, dtype=float))
    q1_mat, q0_mat = conditional_matrices(c, ps, numerics)
    q1 = np.sum(q1_mat * thetas, axis=-1)
    q0 = np.sum(q0_mat * thetas, axis=-1)
    q = ps * q1 + (1.0 - ps) * q0
    val = binary_entropy(q) - ps * binary_entropy(q1) - (1.0 - ps) * binary_entropy(q0)
    return _clamp(val, numerics)


def point_nats(
    decoder: Decoder,
    thetas: NDArray[np.float64],
    ps: NDArray[np.float64],
    numerics: NumericsConfig = DEFAULT_NUMERICS,
) -> NDArray[np.float64]:
    if Decoder(decoder) == Decoder.JOINT:
        return joint_point_nats(thetas, ps, numerics)
    return simple_point_nats(thetas, ps, numerics)


def _scalar_or_array(values: NDArray[np.float64], p: ArrayLike):
    return float(values[0]) if np.ndim(p) == 0 else values


def r_joint_point(ch: CollusionChannel, p: ArrayLike):
    """I(Y; X_C | P=p)/c in bits."""
    ps = np.atleast_1d(np.asarray(p, dtype=float))
    return _scalar_or_array(to_bits(joint_point_nats(ch.as_array(), ps)), p)


def r_simple_point(ch: CollusionChannel, p: ArrayLike):
    """I(Y; X | P=p) in bits."""
    ps = np.atleast_1d(np.asarray(p, dtype=float))
    return _scalar_or_array(to_bits(simple_point_nats(ch.as_array(), ps)), p)


# ---------------------------------------------------------------------- #
# Tables for solvers
# ---------------------------------------------------------------------- #


class RateTables:
    """
    Bernstein tables of one (c, dist) pair on the interior quadrature nodes.

    Endpoint atoms of a discrete pmf carry zero rate and zero Bernstein mass
    on 1..c-1, so they are dropped here.
    """

    def __init__(
        self,
        c: int,
        dist: TimeSharingDist,
        numerics: NumericsConfig = DEFAULT_NUMERICS,
    ) -> None:
        rule = quadrature_rule(dist, numerics)
        keep = rule.interior
        self.c = c
        self.dist = dist
        self.ps = rule.nodes[keep]
        self.weights = rule.weights[keep]
        self.node_count = rule.size
        self.bern = bernstein_matrix(c, self.ps, numerics)
        self.q1_mat, self.q0_mat = conditional_matrices(c, self.ps, numerics)
        self.mass = self.weights @ self.bern          # E[Pr(Sigma=s | P)]
        self.sigma_frac = np.arange(c + 1) / c

    def full_theta(self, interior: ArrayLike) -> NDArray[np.float64]:
        theta = np.empty(self.c + 1)
        theta[0], theta[-1] = 0.0, 1.0
        theta[1:-1] = np.asarray(interior, dtype=float)
        return theta

    def _integrate(self, values: NDArray[np.float64]) -> float:
        return float(self.weights @ values)

    # joint ------------------------------------------------------------ #

    def joint_nats(self, theta: NDArray[np.float64]) -> float:
        q = self.bern @ theta
        cond = self.bern @ binary_entropy(theta)
        return self._integrate(binary_entropy(q) - cond) / self.c

    def joint_kl_nats(self, theta: NDArray[np.float64]) -> float:
        """Average discrimination form: E sum_s Pr(s|P) D(theta_s || q(P)) / c."""
        q = (self.bern @ theta)[:, None]
        qc = (self.bern @ (1.0 - theta))[:, None]
        div = rel_entr(theta[None, :], q) + rel_entr(1.0 - theta[None, :], qc)
        terms = np.where(self.bern > 0.0, self.bern * div, 0.0)
        return self._integrate(terms.sum(axis=1)) / self.c

    def joint_grad_nats(self, theta: NDArray[np.float64]) -> NDArray[np.float64]:
        """d R_joint / d theta_s for s = 1..c-1."""
        inner = np.clip(theta[1:-1], 1e-15, 1.0 - 1e-15)
        q = self.bern @ theta
        llr = np.log(self.bern @ (1.0 - theta)) - np.log(q)
        num = self.weights @ (self.bern[:, 1:-1] * llr[:, None])
        logit = np.log(inner) - np.log1p(-inner)
        return (num + self.mass[1:-1] * logit) / self.c

    # simple ----------------------------------------------------------- #

    def _simple_parts(self, theta: NDArray[np.float64]):
        q1 = self.q1_mat @ theta
        q0 = self.q0_mat @ theta
        q = self.ps * q1 + (1.0 - self.ps) * q0
        return q, q1, q0

    def simple_nats(self, theta: NDArray[np.float64]) -> float:
        q, q1, q0 = self._simple_parts(theta)
        val = binary_entropy(q) - self.ps * binary_entropy(q1) - (1.0 - self.ps) * binary_entropy(q0)
        return self._integrate(val)

    def simple_grad_nats(self, theta: NDArray[np.float64]) -> NDArray[np.float64]:
        """
        d R_simple / d theta_s for s = 1..c-1:
        E[Pr(s|P) (h'(q) - (s/c) h'(q1) - ((c-s)/c) h'(q0))].
        """
        q, q1, q0 = self._simple_parts(theta)
        frac = self.sigma_frac[None, 1:-1]
        inner = (
            binary_entropy_deriv(q)[:, None]
            - frac * binary_entropy_deriv(q1)[:, None]
            - (1.0 - frac) * binary_entropy_deriv(q0)[:, None]
        )
        return self.weights @ (self.bern[:, 1:-1] * inner)

    def nats(self, decoder: Decoder, theta: NDArray[np.float64]) -> float:
        if Decoder(decoder) == Decoder.JOINT:
            return self.joint_nats(theta)
        return self.simple_nats(theta)

    def grad_nats(self, decoder: Decoder, theta: NDArray[np.float64]) -> NDArray[np.float64]:
        if Decoder(decoder) == Decoder.JOINT:
            return self.joint_grad_nats(theta)
        return self.simple_grad_nats(theta)


@lru_cache(maxsize=64)
def rate_tables(c: int, dist: TimeSharingDist, numerics: NumericsConfig = DEFAULT_NUMERICS) -> RateTables:
    return RateTables(c, dist, numerics)


# ---------------------------------------------------------------------- #
# Expected rates
# ---------------------------------------------------------------------- #


def rate_joint(
    ch: CollusionChannel,
    dist: TimeSharingDist,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
) -> float:
    theta = ch.as_array()
    return to_bits(expect(dist, lambda ps: joint_point_nats(theta, ps, numerics), numerics))


def rate_joint_kl(
    ch: CollusionChannel,
    dist: TimeSharingDist,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
) -> float:
    return to_bits(rate_tables(ch.c, dist, numerics).joint_kl_nats(ch.as_array()))


def rate_simple(
    ch: CollusionChannel,
    dist: TimeSharingDist,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
) -> float:
    theta = ch.as_array()
    return to_bits(expect(dist, lambda ps: simple_point_nats(theta, ps, numerics), numerics))


def rate(
    decoder: Decoder,
    ch: CollusionChannel,
    dist: TimeSharingDist,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
) -> float:
    if Decoder(decoder) == Decoder.JOINT:
        return rate_joint(ch, dist, numerics)
    return rate_simple(ch, dist, numerics)


def rate_classd(
    strategy: ClassDStrategy,
    decoder: Decoder,
    dist: TimeSharingDist,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
) -> float:
    """E_P[r(c, P)] with the channel re-evaluated at every node."""

    def integrand(ps: NDArray[np.float64]) -> NDArray[np.float64]:
        return point_nats(decoder, strategy.thetas(ps), ps, numerics)

    return to_bits(expect(dist, integrand, numerics))


def rate_gradient(
    decoder: Decoder,
    ch: CollusionChannel,
    dist: TimeSharingDist,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
) -> NDArray[np.float64]:
    """Gradient in bits with respect to the interior entries theta_1..theta_{c-1}."""
    tables = rate_tables(ch.c, dist, numerics)
    return to_bits(tables.grad_nats(decoder, ch.as_array()))


# ---------------------------------------------------------------------- #
# Closed forms
# ---------------------------------------------------------------------- #


def rate_joint_classA_closed(c: int, dist: TimeSharingDist) -> float:
    """
    Class-A joint rate in closed form.

    Tardos: (1/c) [2 - log e - (1/pi) sum_s G(s+1/2)G(c-s+1/2) / (G(s+1)G(c-s+1)) h(s/c)]
    Flat:   (1/c) [log(e)/2 - (1/(c+1)) sum_s h(s/c)]
    """
    if c < 1:
        raise InvalidInputError(f"invalid collusion size c={c!r}")
    s = np.arange(c + 1, dtype=float)
    h = binary_entropy(s / c)
    if dist.kind == DistKind.TARDOS:
        log_mass = gammaln(s + 0.5) + gammaln(c - s + 0.5) - gammaln(s + 1.0) - gammaln(c - s + 1.0)
        cond = math.fsum((np.exp(log_mass) * h).tolist()) / math.pi
        return to_bits((2.0 * math.log(2.0) - 1.0 - cond) / c)
    if dist.kind == DistKind.FLAT:
        return to_bits((0.5 - math.fsum(h.tolist()) / (c + 1)) / c)
    raise InvalidInputError(f"no Class-A closed form for {dist.selector()}")


def rate_simple_classA_formula(
    c: int,
    dist: TimeSharingDist,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
) -> float:
    """E[h(P)] - E[P h(P + (1-P)/c) + (1-P) h(P (1 - 1/c))], in bits."""

    def integrand(ps: NDArray[np.float64]) -> NDArray[np.float64]:
        return (
            binary_entropy(ps)
            - ps * binary_entropy(ps + (1.0 - ps) / c)
            - (1.0 - ps) * binary_entropy(ps * (1.0 - 1.0 / c))
        )

    return to_bits(expect(dist, integrand, numerics))


def _classd_parts(c: int, p: NDArray[np.float64]) -> Tuple[NDArray[np.float64], ...]:
    with np.errstate(divide="ignore"):
        a = c * np.log(p)
        b = c * np.log1p(-p)
    return a, b, np.logaddexp(a, b)


def r_joint_classd_closed(c: int, p: ArrayLike):
    """
    Worst Class-D joint rate at p, in bits:
    (1/c) [p^c log((1-p)^c/p^c + 1) + (1-p)^c log(p^c/(1-p)^c + 1)].
    """
    if c < 1:
        raise InvalidInputError(f"invalid collusion size c={c!r}")
    ps = np.atleast_1d(np.asarray(p, dtype=float))
    out = np.zeros_like(ps)
    inside = (ps > 0.0) & (ps < 1.0)
    a, b, s = _classd_parts(c, ps[inside])
    out[inside] = (np.exp(a) * (s - a) + np.exp(b) * (s - b)) / c
    return _scalar_or_array(to_bits(out), p)


def dr_joint_classd_dp(c: int, p: ArrayLike):
    """
    Derivative of `r_joint_classd_closed` in p, in bits:
    (1-p)^(c-1) log(1 - theta*) - p^(c-1) log(theta*), theta* = p^c / (p^c + (1-p)^c).
    Positive on (0, 1/2) and zero at 1/2.
    """
    ps = np.atleast_1d(np.asarray(p, dtype=float))
    a, b, s = _classd_parts(c, ps)
    log_theta, log_one_minus = a - s, b - s
    val = np.exp(b - np.log1p(-ps)) * log_one_minus - np.exp(a - np.log(ps)) * log_theta
    return _scalar_or_array(to_bits(val), p)
