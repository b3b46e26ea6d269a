"""
Monte-Carlo oracle: code generation, pirate sequences, empirical rates.

Random streams are derived from (seed, purpose tag), so the code, the time
sharing sequence and the pirate's coin flips never share a generator.

Two estimators of E_P[r(c, P)]:
- Rao-Blackwellized (default): average of the exact pointwise rate at
  sampled p values.
- Plug-in (`plugin=True`): histogram mutual information over simulated
  (Sigma, Y) or (X, Y) pairs, per atom of an atomic pdf. Biased by
  O(1/samples).
"""

from __future__ import annotations

import logging
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from .collusion import ClassDStrategy, CollusionChannel
from .config import DEFAULT_NUMERICS, NumericsConfig, threads
from .entropy import to_bits
from .errors import InternalInvariantError, InvalidInputError
from .rates import Decoder, point_nats
from .timeshare import TimeSharingDist, sample

logger = logging.getLogger(__name__)

MIN_SAMPLES = 10_000
STD_ERR_FLOOR_BITS = 1e-12
CHUNK = 1 << 16

Attack = Union[CollusionChannel, ClassDStrategy]


@dataclass(frozen=True)
class McEstimate:
    mi_bits: float
    std_err_bits: float
    samples: int
    seed: int

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise InvalidInputError(f"samples must be >= 1, got {self.samples}")

    def z_score(self, reference_bits: float) -> float:
        return (self.mi_bits - reference_bits) / self.std_err_bits


@dataclass(frozen=True, eq=False)
class CodeMatrix:
    n: int
    m: int
    bits: NDArray[np.uint8]        # n x m
    p_seq: NDArray[np.float64]     # m


def stream(seed: int, tag: str) -> np.random.Generator:
    """Generator for one purpose; identical (seed, tag) give identical draws."""
    return np.random.default_rng([int(seed), zlib.crc32(tag.encode("utf-8"))])


def _chunk_streams(seed: int, tag: str, count: int) -> List[np.random.Generator]:
    root = np.random.SeedSequence([int(seed), zlib.crc32(tag.encode("utf-8"))])
    return [np.random.default_rng(child) for child in root.spawn(count)]


def generate_code(n: int, m: int, dist: TimeSharingDist, seed: int) -> CodeMatrix:
    if n < 1 or m < 1:
        raise InvalidInputError(f"code needs n >= 1 and m >= 1, got n={n}, m={m}")
    p_seq = sample(dist, m, stream(seed, "time-sharing"))
    bits = (stream(seed, "code").random((n, m)) < p_seq[None, :]).astype(np.uint8)
    return CodeMatrix(n=n, m=m, bits=bits, p_seq=p_seq)


def _thetas_per_index(attack: Attack, sigma: NDArray[np.int64], ps: NDArray[np.float64]) -> NDArray[np.float64]:
    if isinstance(attack, CollusionChannel):
        return attack.as_array()[sigma]
    # Class D: one channel per distinct p (atomic pdfs repeat values)
    uniq, inverse = np.unique(ps, return_inverse=True)
    table = attack.thetas(uniq)
    return table[inverse, sigma]


def apply_collusion(
    code: CodeMatrix,
    colluders: Sequence[int],
    ch: Attack,
    seed: int,
) -> NDArray[np.uint8]:
    """Pirated sequence Y with Y[i] ~ Bernoulli(theta_{Sigma_i}) (theta re-evaluated at p_i in Class D)."""
    idx = np.asarray(list(colluders), dtype=int)
    if idx.size != ch.c:
        raise InvalidInputError(
            f"collusion size mismatch: {idx.size} colluders for a c={ch.c} channel"
        )
    if np.unique(idx).size != idx.size or idx.min() < 0 or idx.max() >= code.n:
        raise InvalidInputError(f"invalid colluder indices {idx.tolist()} for n={code.n}")
    block = code.bits[idx]
    sigma = block.sum(axis=0).astype(np.int64)
    thetas = _thetas_per_index(ch, sigma, code.p_seq)
    y = (stream(seed, "pirate").random(code.m) < thetas).astype(np.uint8)

    # marking assumption: unanimous columns are copied
    unanimous = (sigma == 0) | (sigma == ch.c)
    if np.any(y[unanimous] != block[0, unanimous]):
        raise InternalInvariantError("pirate sequence violates the marking assumption")
    return y


def sigma_y_counts(code: CodeMatrix, colluders: Sequence[int], y: NDArray[np.uint8]) -> NDArray[np.int64]:
    """(c+1) x 2 contingency table of (Sigma, Y)."""
    idx = np.asarray(list(colluders), dtype=int)
    sigma = code.bits[idx].sum(axis=0).astype(np.int64)
    counts = np.zeros((idx.size + 1, 2), dtype=np.int64)
    np.add.at(counts, (sigma, y.astype(np.int64)), 1)
    return counts


# ---------------------------------------------------------------------- #
# Estimators
# ---------------------------------------------------------------------- #


def _rb_chunk(
    decoder: Decoder,
    attack: Attack,
    dist: TimeSharingDist,
    size: int,
    rng: np.random.Generator,
    numerics: NumericsConfig,
) -> NDArray[np.float64]:
    ps = sample(dist, size, rng)
    if isinstance(attack, CollusionChannel):
        thetas = attack.as_array()
    else:
        uniq, inverse = np.unique(ps, return_inverse=True)
        thetas = attack.thetas(uniq)[inverse]
    return point_nats(decoder, thetas, ps, numerics)


def _plugin_chunk(
    decoder: Decoder,
    attack: Attack,
    dist: TimeSharingDist,
    size: int,
    rng: np.random.Generator,
):
    ps = sample(dist, size, rng)
    bits = rng.random((attack.c, size)) < ps[None, :]
    sigma = bits.sum(axis=0).astype(np.int64)
    thetas = _thetas_per_index(attack, sigma, ps)
    y = (rng.random(size) < thetas).astype(np.int64)
    a = sigma if Decoder(decoder) == Decoder.JOINT else bits[0].astype(np.int64)
    return ps, a, y


def _plugin_information(ps, a, y, n_a: int) -> NDArray[np.float64]:
    """Per-sample information density ln(p(a,y) / (p(a) p(y))) with counts taken per atom."""
    dens = np.zeros(ps.size)
    for atom in np.unique(ps):
        sel = ps == atom
        counts = np.zeros((n_a, 2))
        np.add.at(counts, (a[sel], y[sel]), 1.0)
        total = counts.sum()
        pa = counts.sum(axis=1, keepdims=True) / total
        py = counts.sum(axis=0, keepdims=True) / total
        with np.errstate(divide="ignore", invalid="ignore"):
            cell = np.log((counts / total) / (pa * py))
        dens[sel] = cell[a[sel], y[sel]]
    return dens


def estimate_mi(
    decoder: Decoder,
    c: int,
    ch: Attack,
    dist: TimeSharingDist,
    samples: int,
    seed: int,
    plugin: bool = False,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
    workers: Optional[int] = None,
) -> McEstimate:
    """
    Monte-Carlo estimate of the decoder's rate (joint: divided by c).

    Samples are split into fixed chunks with their own sub-streams and merged
    in chunk order, so the result does not depend on `workers`.
    """
    decoder = Decoder(decoder)
    if samples < MIN_SAMPLES:
        raise InvalidInputError(f"estimate_mi needs samples >= {MIN_SAMPLES}, got {samples}")
    if ch.c != c:
        raise InvalidInputError(f"collusion size mismatch: channel c={ch.c}, requested c={c}")
    if plugin and not dist.is_atomic:
        raise InvalidInputError("plug-in estimator needs an atomic pdf (dirac or discrete)")

    sizes = [CHUNK] * (samples // CHUNK)
    if samples % CHUNK:
        sizes.append(samples % CHUNK)
    rngs = _chunk_streams(seed, "plugin" if plugin else "rao-blackwell", len(sizes))
    n_workers = workers or threads()

    if plugin:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(lambda job: _plugin_chunk(decoder, ch, dist, *job), zip(sizes, rngs)))
        ps = np.concatenate([p for p, _, _ in parts])
        a = np.concatenate([x for _, x, _ in parts])
        y = np.concatenate([v for _, _, v in parts])
        values = _plugin_information(ps, a, y, c + 1 if decoder == Decoder.JOINT else 2)
        if decoder == Decoder.JOINT:
            values = values / c
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(lambda job: _rb_chunk(decoder, ch, dist, *job, numerics), zip(sizes, rngs)))
        values = np.concatenate(parts)

    mi = to_bits(float(np.mean(values)))
    std_err = to_bits(float(np.std(values, ddof=1)) / math.sqrt(values.size))
    est = McEstimate(mi_bits=mi, std_err_bits=max(std_err, STD_ERR_FLOOR_BITS), samples=samples, seed=seed)
    logger.info(
        "[MC] decoder=%s c=%d pdf=%s mi=%.6f +- %.2e bits (%d samples, %s)",
        decoder.value, c, dist.selector(), est.mi_bits, est.std_err_bits, samples,
        "plug-in" if plugin else "rao-blackwell",
    )
    return est
