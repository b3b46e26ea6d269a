"""
Time-sharing distributions f(p) and expectations E_P[g(P)].

Four kinds are supported:
- Tardos: arcsine density 1/(pi sqrt(p(1-p)))
- Flat: uniform on [0, 1]
- DiracPair(p0): mass 1/2 at p0 and at 1-p0 (one atom when p0 = 1/2)
- Discrete: a finite pmf, e.g. the uniform pmf on {k/n} of `bs(n)`

Continuous kinds are integrated with fixed rules cached per node count:
- Tardos: p = (1 - cos u)/2 turns the weight into du/pi, so a midpoint
  rule in u is Gauss-Chebyshev and exact for polynomials of degree < 2N.
- Flat: Gauss-Legendre mapped to [0, 1].
Atomic kinds use the exact weighted sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import DEFAULT_NUMERICS, NumericsConfig
from .errors import IntegrandError, InvalidInputError

_WEIGHT_SUM_TOL = 1e-12
_SYMMETRY_TOL = 1e-12


class DistKind(str, Enum):
    TARDOS = "tardos"
    FLAT = "flat"
    DIRAC_PAIR = "dirac"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class PointMass:
    """Density descriptor for atomic kinds: the mass sitting at p."""

    p: float
    mass: float


@dataclass(frozen=True)
class TimeSharingDist:
    kind: DistKind
    p0: Optional[float] = None                              # DiracPair only
    support: Tuple[Tuple[float, float], ...] = ()          # Discrete only: (p_k, w_k)
    label_hint: Optional[str] = None                        # e.g. "bs:10"

    def __post_init__(self) -> None:
        if self.kind == DistKind.DIRAC_PAIR:
            if self.p0 is None or not (0.0 < self.p0 <= 0.5):
                raise InvalidInputError(f"DiracPair needs p0 in (0, 1/2], got {self.p0!r}")
        elif self.kind == DistKind.DISCRETE:
            if not self.support:
                raise InvalidInputError("Discrete distribution needs at least one support point")
            total = 0.0
            for p, w in self.support:
                if not (0.0 <= p <= 1.0):
                    raise InvalidInputError(f"support point {p!r} outside [0, 1]")
                if not (w > 0.0):
                    raise InvalidInputError(f"weight {w!r} at p={p!r} must be positive")
                total += w
            if abs(total - 1.0) > _WEIGHT_SUM_TOL:
                raise InvalidInputError(f"Discrete weights sum to {total!r}, expected 1")

    # ------------------------------------------------------------------ #
    # Constructors
    # ------------------------------------------------------------------ #

    @classmethod
    def tardos(cls) -> "TimeSharingDist":
        return cls(DistKind.TARDOS)

    @classmethod
    def flat(cls) -> "TimeSharingDist":
        return cls(DistKind.FLAT)

    @classmethod
    def dirac_pair(cls, p0: float) -> "TimeSharingDist":
        return cls(DistKind.DIRAC_PAIR, p0=float(p0))

    @classmethod
    def discrete(cls, points) -> "TimeSharingDist":
        support = tuple((float(p), float(w)) for p, w in points)
        return cls(DistKind.DISCRETE, support=support)

    @classmethod
    def bs(cls, n: int) -> "TimeSharingDist":
        """Probabilistic Boneh-Shaw-like pmf: uniform over {0, 1/n, ..., 1}."""
        if n < 1:
            raise InvalidInputError(f"bs pmf needs n >= 1, got {n}")
        w = 1.0 / (n + 1)
        support = tuple((k / n, w) for k in range(n + 1))
        return cls(DistKind.DISCRETE, support=support, label_hint=f"bs:{n}")

    # ------------------------------------------------------------------ #
    # Properties
    # ------------------------------------------------------------------ #

    @property
    def is_atomic(self) -> bool:
        return self.kind in (DistKind.DIRAC_PAIR, DistKind.DISCRETE)

    @property
    def is_symmetric(self) -> bool:
        if self.kind != DistKind.DISCRETE:
            return True
        for p, w in self.support:
            mirrored = sum(wk for pk, wk in self.support if abs(pk - (1.0 - p)) <= _SYMMETRY_TOL)
            same = sum(wk for pk, wk in self.support if abs(pk - p) <= _SYMMETRY_TOL)
            if abs(mirrored - same) > _SYMMETRY_TOL:
                return False
        return True

    def atoms(self) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        """(points, masses) for atomic kinds."""
        if self.kind == DistKind.DIRAC_PAIR:
            if self.p0 == 0.5:
                return np.array([0.5]), np.array([1.0])
            return np.array([self.p0, 1.0 - self.p0]), np.array([0.5, 0.5])
        if self.kind == DistKind.DISCRETE:
            pts = np.array([p for p, _ in self.support], dtype=float)
            ws = np.array([w for _, w in self.support], dtype=float)
            return pts, ws
        raise InvalidInputError(f"{self.kind.value} distribution has no atoms")

    def selector(self) -> str:
        """Inverse of `parse_dist`."""
        if self.label_hint:
            return self.label_hint
        if self.kind == DistKind.DIRAC_PAIR:
            return f"dirac:{self.p0!r}"
        if self.kind == DistKind.DISCRETE:
            return "discrete:" + ",".join(f"{p!r}:{w!r}" for p, w in self.support)
        return self.kind.value


# ---------------------------------------------------------------------- #
# Selector parsing
# ---------------------------------------------------------------------- #


def parse_dist(text: str) -> TimeSharingDist:
    """
    Parse a distribution selector.

    Accepted forms:
    - "tardos", "flat"
    - "dirac:<p0>"
    - "discrete:<p1>:<w1>,<p2>:<w2>,..."
    - "bs:<n>"
    """
    raw = text.strip()
    lowered = raw.lower()
    if lowered == "tardos":
        return TimeSharingDist.tardos()
    if lowered == "flat":
        return TimeSharingDist.flat()

    head, sep, tail = raw.partition(":")
    head = head.lower()
    if not sep:
        raise InvalidInputError(f"unknown distribution selector {text!r}")
    try:
        if head == "dirac":
            return TimeSharingDist.dirac_pair(float(tail))
        if head == "bs":
            return TimeSharingDist.bs(int(tail))
        if head == "discrete":
            points = []
            for item in tail.split(","):
                p_txt, _, w_txt = item.partition(":")
                points.append((float(p_txt), float(w_txt)))
            return TimeSharingDist.discrete(points)
    except ValueError as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"malformed distribution selector {text!r}: {exc}") from exc
    raise InvalidInputError(f"unknown distribution selector {text!r}")


# ---------------------------------------------------------------------- #
# Density
# ---------------------------------------------------------------------- #


def density(dist: TimeSharingDist, p: float):
    """
    f(p) for continuous kinds, a PointMass for atomic kinds.
    """
    if dist.kind == DistKind.TARDOS:
        if p <= 0.0 or p >= 1.0:
            raise InvalidInputError(f"endpoint singularity of the Tardos density at p={p!r}")
        return 1.0 / (math.pi * math.sqrt(p * (1.0 - p)))
    if dist.kind == DistKind.FLAT:
        if p < 0.0 or p > 1.0:
            raise InvalidInputError(f"p={p!r} outside [0, 1]")
        return 1.0
    pts, ws = dist.atoms()
    mass = float(ws[np.abs(pts - p) <= _SYMMETRY_TOL].sum())
    return PointMass(p=float(p), mass=mass)


# ---------------------------------------------------------------------- #
# Quadrature
# ---------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @property
    def interior(self) -> NDArray[np.bool_]:
        return (self.nodes > 0.0) & (self.nodes < 1.0)


def _frozen(arr: NDArray[np.float64]) -> NDArray[np.float64]:
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=32)
def _tardos_rule(n: int) -> QuadratureRule:
    half_u = (np.arange(n) + 0.5) * (math.pi / (2 * n))
    nodes = np.sin(half_u) ** 2
    weights = np.full(n, 1.0 / n)
    return QuadratureRule(_frozen(nodes), _frozen(weights))


@lru_cache(maxsize=32)
def _flat_rule(n: int) -> QuadratureRule:
    x, w = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(_frozen(0.5 * (x + 1.0)), _frozen(0.5 * w))


def quadrature_rule(
    dist: TimeSharingDist,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
    nodes: Optional[int] = None,
) -> QuadratureRule:
    """Nodes and weights for E_P[.]; `nodes` overrides the configured count."""
    if dist.kind == DistKind.TARDOS:
        return _tardos_rule(int(nodes or numerics.tardos_nodes))
    if dist.kind == DistKind.FLAT:
        return _flat_rule(int(nodes or numerics.flat_nodes))
    pts, ws = dist.atoms()
    return QuadratureRule(_frozen(pts), _frozen(ws))


def expect(
    dist: TimeSharingDist,
    g: Callable[[NDArray[np.float64]], ArrayLike],
    numerics: NumericsConfig = DEFAULT_NUMERICS,
    nodes: Optional[int] = None,
) -> float:
    """
    E_P[g(P)].

    `g` is called once on the whole node array and must be vectorized
    (a scalar return is broadcast). Summation is compensated (math.fsum),
    so the result is reproducible for a fixed node count.
    """
    rule = quadrature_rule(dist, numerics, nodes)
    values = np.broadcast_to(np.asarray(g(rule.nodes), dtype=float), rule.nodes.shape)
    bad = ~np.isfinite(values)
    if bad.any():
        p_bad = float(rule.nodes[np.argmax(bad)])
        raise IntegrandError(f"integrand failure at p={p_bad!r}", {"p": p_bad})
    return math.fsum((rule.weights * values).tolist())


def sample(dist: TimeSharingDist, size: int, rng: np.random.Generator) -> NDArray[np.float64]:
    """Draw `size` i.i.d. values of P."""
    if dist.kind == DistKind.TARDOS:
        # inverse CDF of the arcsine law
        return np.sin(0.5 * math.pi * rng.random(size)) ** 2
    if dist.kind == DistKind.FLAT:
        return rng.random(size)
    pts, ws = dist.atoms()
    if pts.size == 1:
        return np.full(size, pts[0])
    return pts[rng.choice(pts.size, size=size, p=ws / ws.sum())]
