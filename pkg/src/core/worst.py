"""
Worst-case collusion channels per (decoder, class).

Joint decoder:
- Classes B/C: alternating minimization (Blahut-Arimoto style) starting
  from the Class-A vector. For a symmetric pdf the fixed point is Class B.
- Class D: closed form theta*(p) = p^c / (p^c + (1-p)^c).

Simple decoder:
- Classes B/C: multistart L-BFGS-B on the box [0,1]^(c-1) with the
  analytic gradient, plus a search restricted to Class B.
- Class D: minority-type strategies; null rate on [eta_c, 1 - eta_c],
  a one-dimensional line search below 1/c, forced theta_1 = 1 in between.

Also: eta_c, the Class-D joint capacity, and the projection of the arcsine
cdf onto the Bernstein span.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import quad
from scipy.optimize import minimize
from scipy.special import comb, expit, logit

from .collusion import (
    ClassDStrategy,
    CollusionChannel,
    StrategyKind,
    bernstein_matrix,
    classA,
)
from .config import DEFAULT_NUMERICS, NumericsConfig, threads
from .entropy import binary_entropy, to_bits
from .errors import (
    CapabilityError,
    ConvergenceError,
    DegenerateUpdateError,
    InternalInvariantError,
    InvalidInputError,
)
from .linesearch import bisect_sign, grid_then_golden
from .rates import Decoder, RateTables, rate_tables
from .timeshare import TimeSharingDist

logger = logging.getLogger(__name__)

CLASSB_GAP_WARN_BITS = 1e-4
_ASCENT_SLACK_NATS = 1e-13
_LINE_SEARCH_CHUNK = 2048


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 10_000
    gap_tol_bits: float = 1e-12
    grid_points: int = 1001
    restarts: int = 20
    seed: int = 0

    def validate(self) -> "SolverConfig":
        problems: List[str] = []
        if self.max_iters < 1:
            problems.append(f"max_iters={self.max_iters} must be >= 1")
        if not (self.gap_tol_bits > 0.0):
            problems.append(f"gap_tol_bits={self.gap_tol_bits} must be > 0")
        if self.grid_points < 11:
            problems.append(f"grid_points={self.grid_points} must be >= 11")
        if self.restarts < 1:
            problems.append(f"restarts={self.restarts} must be >= 1")
        if problems:
            raise InvalidInputError("invalid solver config: " + "; ".join(problems))
        return self

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


DEFAULT_SOLVER = SolverConfig()


def _require_c(c: int, low: int, cap: int, what: str) -> None:
    if not isinstance(c, (int, np.integer)) or c < low:
        raise InvalidInputError(f"{what} needs c >= {low}, got c={c!r}")
    if c > cap:
        raise CapabilityError(f"{what} supports c <= {cap}, got c={c}")


# ---------------------------------------------------------------------- #
# Joint decoder, stationary classes
# ---------------------------------------------------------------------- #


def _ba_update(tables: RateTables, theta: NDArray[np.float64]) -> NDArray[np.float64]:
    """theta_s = 1 / (1 + B(s)), B(s) = exp(E[Pr(s|P) ln((1-q)/q)] / E[Pr(s|P)])."""
    q = tables.bern @ theta
    q_comp = tables.bern @ (1.0 - theta)
    if np.any(q <= 0.0) or np.any(q_comp <= 0.0):
        p_bad = float(tables.ps[np.argmax((q <= 0.0) | (q_comp <= 0.0))])
        raise DegenerateUpdateError(f"degenerate update: q is 0 or 1 at interior p={p_bad!r}")
    mass = tables.mass[1:-1]
    if np.any(mass <= 0.0):
        raise DegenerateUpdateError("degenerate update: Pr(Sigma=s) vanishes for some interior s")
    llr = np.log(q_comp) - np.log(q)
    mean_llr = (tables.weights @ (tables.bern[:, 1:-1] * llr[:, None])) / mass
    new = theta.copy()
    new[1:-1] = expit(-mean_llr)
    return new


def _run_ba(
    c: int,
    dist: TimeSharingDist,
    cfg: SolverConfig,
    numerics: NumericsConfig,
) -> Tuple[NDArray[np.float64], float, Dict[str, Any]]:
    tables = rate_tables(c, dist, numerics)
    theta = classA(c).as_array()
    rate_prev = tables.joint_kl_nats(theta)
    gap_bits = math.inf
    for it in range(1, cfg.max_iters + 1):
        theta = _ba_update(tables, theta)
        rate_now = tables.joint_kl_nats(theta)
        step = rate_prev - rate_now
        if step < -_ASCENT_SLACK_NATS:
            raise InternalInvariantError(
                f"BA ascent at iter {it}: rate rose by {to_bits(-step):.3e} bits",
                {"iteration": it},
            )
        gap_bits = abs(to_bits(step))
        logger.debug("[BA LOOP] iter=%d, rate=%.12f bits, gap=%.3e", it, to_bits(rate_now), gap_bits)
        rate_prev = rate_now
        if gap_bits < cfg.gap_tol_bits:
            fixed = _ba_update(tables, theta)
            info = {
                "iterations": it,
                "final_gap_bits": gap_bits,
                "node_count": tables.node_count,
                "fixed_point_residual": float(np.max(np.abs(fixed - theta))),
            }
            logger.info("[BA LOOP] converged c=%d after %d iterations, rate=%.6f bits", c, it, to_bits(rate_now))
            return theta, to_bits(rate_now), info
    raise ConvergenceError(
        f"BA did not converge for c={c} within {cfg.max_iters} iterations",
        last_gap_bits=gap_bits,
        iterations=cfg.max_iters,
        payload={"theta": theta.tolist()},
    )


def worst_joint_bc(
    c: int,
    dist: TimeSharingDist,
    cfg: SolverConfig = DEFAULT_SOLVER,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
    diagnostics_out: Optional[Dict[str, Any]] = None,
) -> Tuple[CollusionChannel, float]:
    """Worst stationary channel against the joint decoder (Class C; Class B for symmetric pdfs)."""
    cfg.validate()
    _require_c(c, 2, numerics.max_c_ba, "worst_joint_bc")
    theta, rate_bits, info = _run_ba(c, dist, cfg, numerics)
    if diagnostics_out is not None:
        diagnostics_out.update(info)
    return CollusionChannel(c, tuple(theta), "worst-joint"), rate_bits


def worst_joint_classb(
    c: int,
    dist: TimeSharingDist,
    cfg: SolverConfig = DEFAULT_SOLVER,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
    diagnostics_out: Optional[Dict[str, Any]] = None,
) -> Tuple[CollusionChannel, float]:
    """
    Worst Class-B channel against the joint decoder.

    A symmetric pdf keeps the BA iterates in Class B. Otherwise the convex
    objective is minimized over the free half of the vector.
    """
    if dist.is_symmetric:
        return worst_joint_bc(c, dist, cfg, numerics, diagnostics_out)
    cfg.validate()
    _require_c(c, 2, numerics.max_c_ba, "worst_joint_classb")
    tables = rate_tables(c, dist, numerics)
    best, info = _multistart(tables, Decoder.JOINT, cfg, symmetric=True, restarts=1)
    if diagnostics_out is not None:
        diagnostics_out.update(info)
    return CollusionChannel(c, tuple(best.theta), "worst-joint-B"), to_bits(best.rate_nats)


# ---------------------------------------------------------------------- #
# Joint decoder, Class D
# ---------------------------------------------------------------------- #


def _joint_classd_theta(c: int, ps: NDArray[np.float64]) -> NDArray[np.float64]:
    return expit(c * logit(np.clip(ps, 0.0, 1.0)))


def worst_joint_classd(c: int) -> ClassDStrategy:
    """theta*(p) = p^c / (p^c + (1-p)^c) on every interior coordinate."""
    _require_c(c, 2, DEFAULT_NUMERICS.max_c_closed_form, "worst_joint_classd")

    def rule(ps: NDArray[np.float64]) -> NDArray[np.float64]:
        out = np.empty((ps.size, c + 1))
        out[:, 0] = 0.0
        out[:, -1] = 1.0
        out[:, 1:-1] = _joint_classd_theta(c, ps)[:, None]
        return out

    return ClassDStrategy(c, rule, StrategyKind.JOINT_CLOSED_FORM, "worst-joint-D")


def capacity_classd_joint(c: int) -> float:
    """1 / (c 2^(c-1)) bits, reached with all mass at p = 1/2."""
    _require_c(c, 2, DEFAULT_NUMERICS.max_c_closed_form, "capacity_classd_joint")
    return 1.0 / (c * 2.0 ** (c - 1))


# ---------------------------------------------------------------------- #
# Simple decoder, Class D
# ---------------------------------------------------------------------- #


def eta_c(c: int) -> float:
    """
    Lower end of the null-rate interval [eta_c, 1 - eta_c].

    Root in [1/c, 2/c] of (1-p)^(c-2) (1-cp) + p^(c-1). The sign test runs
    in log form, (c-1) ln p > (c-2) ln(1-p) + ln(cp-1), so large c does not
    underflow. For c = 3 the polynomial is (1-2p)^2 and the root is 1/2.
    """
    if not isinstance(c, (int, np.integer)) or c < 3:
        raise InvalidInputError(f"no null-rate interval for c={c!r} (needs c >= 3)")
    _require_c(c, 3, DEFAULT_NUMERICS.max_c_closed_form, "eta_c")
    if c == 3:
        return 0.5

    def positive(p: float) -> bool:
        slack = c * p - 1.0
        if slack <= 0.0:
            return True
        return (c - 1) * math.log(p) > (c - 2) * math.log1p(-p) + math.log(slack)

    return bisect_sign(positive, 1.0 / c, 2.0 / c, tol=1e-14)


def _hyperplane_lambda(c: int, ps: NDArray[np.float64]) -> NDArray[np.float64]:
    """lambda = -rho_c / rho_1 = p^(c-1) / ((1-p)^(c-2) (cp - 1)), for 1/c < p <= 1/2."""
    with np.errstate(divide="ignore"):
        log_lam = (c - 1) * np.log(ps) - (c - 2) * np.log1p(-ps) - np.log(c * ps - 1.0)
    lam = np.exp(log_lam)
    worst = float(np.max(lam)) if lam.size else 0.0
    if worst > 1.0 + 1e-9 or np.any(~np.isfinite(lam)):
        raise InternalInvariantError(
            f"null-rate hyperplane point outside [0,1] for c={c}: lambda={worst!r}"
        )
    return np.minimum(lam, 1.0)


def simple_classd_objective(c: int, theta: NDArray[np.float64], p: NDArray[np.float64]) -> NDArray[np.float64]:
    """
    I(Y;X|p) in nats along theta = (0, t, 0, ..., 0, 1):
    h(g1) - p h(g2) - (1-p) h(g3) with
    g1 = t c p (1-p)^(c-1) + p^c, g2 = t (1-p)^(c-1) + p^(c-1), g3 = t (c-1) p (1-p)^(c-2).
    """
    omp = 1.0 - p
    g1 = theta * c * p * omp ** (c - 1) + p ** c
    g2 = theta * omp ** (c - 1) + p ** (c - 1)
    g3 = theta * (c - 1) * p * omp ** (c - 2)
    return binary_entropy(g1) - p * binary_entropy(g2) - omp * binary_entropy(g3)


def _line_search_theta1(c: int, ps: NDArray[np.float64], cfg: SolverConfig) -> NDArray[np.float64]:
    out = np.empty(ps.size)
    for start in range(0, ps.size, _LINE_SEARCH_CHUNK):
        chunk = ps[start:start + _LINE_SEARCH_CHUNK]
        theta, _ = grid_then_golden(
            lambda t, idx: simple_classd_objective(c, t, chunk[idx]),
            rows=chunk.size,
            grid_points=cfg.grid_points,
            tol=1e-12,
        )
        out[start:start + chunk.size] = theta
    logger.debug("[LINE SEARCH] c=%d solved %d points below 1/c", c, ps.size)
    return out


def worst_simple_classd(c: int, cfg: SolverConfig = DEFAULT_SOLVER) -> ClassDStrategy:
    """Worst p-aware attack against the simple decoder."""
    cfg.validate()
    _require_c(c, 2, DEFAULT_NUMERICS.max_c_closed_form, "worst_simple_classd")
    if c == 2:
        # same rule as the joint decoder
        joint = worst_joint_classd(2)
        return ClassDStrategy(2, joint.rule, StrategyKind.SIMPLE_WORST, "worst-simple-D")

    eta = eta_c(c)
    lower = 1.0 / c

    def low_half(ps: NDArray[np.float64]) -> NDArray[np.float64]:
        """theta_1 for p <= 1/2; every other interior entry is 0."""
        t1 = np.ones(ps.size)
        below = ps < lower
        if below.any():
            t1[below] = _line_search_theta1(c, ps[below], cfg)
        null = ps >= eta
        if null.any():
            t1[null] = _hyperplane_lambda(c, ps[null])
        # 1/c <= p < eta keeps theta_1 = 1
        return t1

    def rule(ps: NDArray[np.float64]) -> NDArray[np.float64]:
        ps = np.clip(ps, 0.0, 1.0)
        out = np.zeros((ps.size, c + 1))
        out[:, -1] = 1.0
        left = ps <= 0.5
        if left.any():
            out[left, 1] = low_half(ps[left])
        right = ~left
        if right.any():
            # mirror: theta'(p)_s = 1 - theta(1-p)_{c-s}
            out[right, 1:-1] = 1.0
            out[right, c - 1] = 1.0 - low_half(1.0 - ps[right])
        return out

    return ClassDStrategy(c, rule, StrategyKind.SIMPLE_WORST, "worst-simple-D")


# ---------------------------------------------------------------------- #
# Box searches (simple B/C, joint B for asymmetric pdfs)
# ---------------------------------------------------------------------- #


@dataclass
class RestartResult:
    index: int
    theta: NDArray[np.float64]
    rate_nats: float
    start_rate_nats: float
    success: bool
    iterations: int
    message: str = ""

    @property
    def stalled(self) -> bool:
        return not self.success and self.rate_nats >= self.start_rate_nats


@dataclass
class _Parametrization:
    """Maps free variables to the interior of theta, optionally along Class B."""

    c: int
    symmetric: bool
    size: int = field(init=False)

    def __post_init__(self) -> None:
        self.size = (self.c - 1) // 2 if self.symmetric else self.c - 1

    def to_interior(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        if not self.symmetric:
            return x
        inner = np.full(self.c - 1, 0.5)
        k = self.size
        inner[:k] = x
        inner[self.c - 1 - k:] = 1.0 - x[::-1]
        return inner

    def pull_grad(self, grad: NDArray[np.float64]) -> NDArray[np.float64]:
        if not self.symmetric:
            return grad
        k = self.size
        return grad[:k] - grad[::-1][:k]

    def from_interior(self, inner: NDArray[np.float64]) -> NDArray[np.float64]:
        return inner[: self.size].copy() if self.symmetric else inner.copy()


def _one_restart(
    tables: RateTables,
    decoder: Decoder,
    param: _Parametrization,
    x0: NDArray[np.float64],
    index: int,
    cfg: SolverConfig,
) -> RestartResult:
    def objective(x: NDArray[np.float64]) -> Tuple[float, NDArray[np.float64]]:
        theta = tables.full_theta(param.to_interior(np.clip(x, 0.0, 1.0)))
        return tables.nats(decoder, theta), param.pull_grad(tables.grad_nats(decoder, theta))

    start_rate, _ = objective(x0)
    if param.size == 0:
        return RestartResult(index, tables.full_theta(param.to_interior(x0)), start_rate, start_rate, True, 0)
    res = minimize(
        objective,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=[(0.0, 1.0)] * param.size,
        options={"maxiter": cfg.max_iters, "ftol": 1e-15, "gtol": 1e-11, "maxls": 50},
    )
    x_best = np.clip(res.x, 0.0, 1.0)
    rate_best = float(res.fun)
    if rate_best > start_rate:
        x_best, rate_best = x0, start_rate
    theta = tables.full_theta(param.to_interior(x_best))
    logger.debug(
        "[MULTISTART] restart=%d symmetric=%s rate=%.9f bits status=%s nit=%d",
        index, param.symmetric, to_bits(rate_best), res.success, res.nit,
    )
    return RestartResult(index, theta, rate_best, start_rate, bool(res.success), int(res.nit), str(res.message))


def _multistart(
    tables: RateTables,
    decoder: Decoder,
    cfg: SolverConfig,
    symmetric: bool,
    restarts: Optional[int] = None,
) -> Tuple[RestartResult, Dict[str, Any]]:
    """
    Restart 0 starts at Class A; restart i >= 1 at a uniform point drawn from
    default_rng([seed, family, i]). Best rate wins, ties go to the lowest index.
    """
    param = _Parametrization(tables.c, symmetric)
    n_starts = cfg.restarts if restarts is None else restarts
    family = 1 if symmetric else 0
    starts = [param.from_interior(classA(tables.c).interior)]
    for i in range(1, n_starts):
        rng = np.random.default_rng([cfg.seed, family, i])
        starts.append(rng.random(param.size))

    with ThreadPoolExecutor(max_workers=threads()) as pool:
        results = list(pool.map(
            lambda item: _one_restart(tables, decoder, param, item[1], item[0], cfg),
            enumerate(starts),
        ))

    best = results[0]
    for res in results[1:]:
        if res.rate_nats < best.rate_nats:
            best = res
    info = {
        "restart_rates_bits": [to_bits(r.rate_nats) for r in results],
        "restart_endpoints": [r.theta.tolist() for r in results],
        "iterations": sum(r.iterations for r in results),
        "node_count": tables.node_count,
        "best_restart": best.index,
    }
    if all(r.stalled for r in results):
        raise ConvergenceError(
            "optimizer stalled: no restart made line-search progress",
            last_gap_bits=math.nan,
            iterations=info["iterations"],
            payload={"best_theta": best.theta.tolist(), "best_rate_bits": to_bits(best.rate_nats)},
        )
    return best, info


def worst_simple_bc(
    c: int,
    dist: TimeSharingDist,
    cfg: SolverConfig = DEFAULT_SOLVER,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
    diagnostics_out: Optional[Dict[str, Any]] = None,
) -> Tuple[CollusionChannel, float]:
    """
    Best channel found against the simple decoder over the full box.

    For symmetric pdfs the Class-B restricted search also runs; the better
    of the two is returned and their gap is reported.
    """
    cfg.validate()
    _require_c(c, 2, numerics.max_c_simple_bc, "worst_simple_bc")
    tables = rate_tables(c, dist, numerics)
    best, info = _multistart(tables, Decoder.SIMPLE, cfg, symmetric=False)
    full_bits = to_bits(best.rate_nats)
    info["full_box_rate_bits"] = full_bits
    th = best.theta
    info["symmetry_residual"] = float(np.max(np.abs(th - (1.0 - th[::-1]))))

    if dist.is_symmetric:
        best_b, info_b = _multistart(tables, Decoder.SIMPLE, cfg, symmetric=True)
        b_bits = to_bits(best_b.rate_nats)
        gap = full_bits - b_bits
        info["classb_rate_bits"] = b_bits
        info["classb_gap_bits"] = gap
        info["iterations"] += info_b["iterations"]
        if abs(gap) > CLASSB_GAP_WARN_BITS:
            logger.warning(
                "[MULTISTART] c=%d full-box and Class-B searches differ by %.3e bits", c, gap
            )
        if best_b.rate_nats < best.rate_nats:
            best = best_b
    logger.info("[MULTISTART] c=%d worst simple rate %.6f bits", c, to_bits(best.rate_nats))
    if diagnostics_out is not None:
        diagnostics_out.update(info)
    return CollusionChannel(c, tuple(best.theta), "worst-simple"), to_bits(best.rate_nats)


def worst_simple_classb(
    c: int,
    dist: TimeSharingDist,
    cfg: SolverConfig = DEFAULT_SOLVER,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
    diagnostics_out: Optional[Dict[str, Any]] = None,
) -> Tuple[CollusionChannel, float]:
    """Class-B restricted search against the simple decoder."""
    cfg.validate()
    _require_c(c, 2, numerics.max_c_simple_bc, "worst_simple_classb")
    tables = rate_tables(c, dist, numerics)
    best, info = _multistart(tables, Decoder.SIMPLE, cfg, symmetric=True)
    if diagnostics_out is not None:
        diagnostics_out.update(info)
    return CollusionChannel(c, tuple(best.theta), "worst-simple-B"), to_bits(best.rate_nats)


# ---------------------------------------------------------------------- #
# Projection of the arcsine cdf onto the Bernstein span
# ---------------------------------------------------------------------- #


def q_conv(p: NDArray[np.float64]) -> NDArray[np.float64]:
    """2 arcsin(sqrt(p)) / pi."""
    return 2.0 * np.arcsin(np.sqrt(np.clip(p, 0.0, 1.0))) / math.pi


def _bernstein_inner(c: int, s: NDArray[np.float64], t: NDArray[np.float64]) -> NDArray[np.float64]:
    """Integral over [0,1] of B_s B_t = C(c,s) C(c,t) / ((2c+1) C(2c, s+t))."""
    return comb(c, s) * comb(c, t) / ((2 * c + 1) * comb(2 * c, s + t))


def _arcsine_moment(c: int, s: int) -> float:
    # p = sin^2(u/2) makes q_conv(p) = u/pi and dp = sin(u)/2 du
    def integrand(u: float) -> float:
        p = math.sin(0.5 * u) ** 2
        b = float(bernstein_matrix(c, [p])[0, s])
        return (u / math.pi) * b * 0.5 * math.sin(u)

    value, _ = quad(integrand, 0.0, math.pi, epsabs=1e-14, epsrel=1e-12, limit=200)
    return value


def projection_coefficients(c: int) -> NDArray[np.float64]:
    """
    theta (full, c+1 entries, not clipped) with theta_0 = 0, theta_c = 1 and
    prob_y1(theta, .) - q_conv orthogonal to B_1..B_{c-1} in L2[0,1].
    """
    _require_c(c, 2, DEFAULT_NUMERICS.max_c_closed_form, "conv_projection_attack")
    idx = np.arange(1, c, dtype=float)
    gram = _bernstein_inner(c, idx[:, None], idx[None, :])
    rhs = np.array([_arcsine_moment(c, int(s)) for s in idx]) - _bernstein_inner(c, idx, np.full_like(idx, c))
    try:
        inner = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise InternalInvariantError(f"singular Bernstein Gram matrix for c={c}") from exc
    if not np.all(np.isfinite(inner)):
        raise InternalInvariantError(f"non-finite projection for c={c}")
    return np.concatenate([[0.0], inner, [1.0]])


def projection_l2_distance(c: int, theta: Optional[NDArray[np.float64]] = None) -> float:
    """||sum_s theta_s B_s - q_conv||_2 on [0,1]."""
    if theta is None:
        theta = projection_coefficients(c)

    def sq_err(u: float) -> float:
        p = math.sin(0.5 * u) ** 2
        diff = float(bernstein_matrix(c, [p])[0] @ theta) - u / math.pi
        return diff * diff * 0.5 * math.sin(u)

    value, _ = quad(sq_err, 0.0, math.pi, epsabs=1e-15, epsrel=1e-12, limit=200)
    return math.sqrt(value)


def conv_projection_attack(
    c: int,
    diagnostics_out: Optional[Dict[str, Any]] = None,
) -> CollusionChannel:
    """
    Projection attack as a channel. Entries outside [0, 1] are clipped; the
    raw coefficients are kept in diagnostics.
    """
    raw = projection_coefficients(c)
    clipped = np.clip(raw, 0.0, 1.0)
    excess = float(np.max(np.abs(raw - clipped)))
    if excess > 1e-9:
        logger.warning("projection for c=%d leaves [0,1] by %.3e; clipped", c, excess)
    if diagnostics_out is not None:
        diagnostics_out.update({
            "raw_theta": raw.tolist(),
            "clip_excess": excess,
            "l2_distance": projection_l2_distance(c, raw),
        })
    return CollusionChannel(c, tuple(clipped), "conv-projection")


def projection_gap(
    c: int,
    dist: TimeSharingDist,
    cfg: SolverConfig = DEFAULT_SOLVER,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
) -> Dict[str, float]:
    """Distance between the projection attack and the simple B/C search result."""
    proj = conv_projection_attack(c)
    found, found_bits = worst_simple_bc(c, dist, cfg, numerics)
    tables = rate_tables(c, dist, numerics)
    gap = {
        "theta_gap": float(np.max(np.abs(proj.as_array() - found.as_array()))),
        "projection_rate_bits": to_bits(tables.simple_nats(proj.as_array())),
        "search_rate_bits": found_bits,
    }
    logger.info("[PROJECTION] c=%d theta gap %.4f, rate gap %.2e bits",
                c, gap["theta_gap"], gap["projection_rate_bits"] - found_bits)
    return gap
