from __future__ import annotations

"""
RateManager

Central place that decides *which* decoder backend and which solver or
closed form answers a (decoder, class) request:

- Class A: the fixed channel theta_s = s/c, evaluated by quadrature.
- Class B / C: the backend's worst stationary solver.
- Class D: the backend's p-aware strategy, integrated node by node.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from .collusion import ClassDStrategy, ClassTag, CollusionChannel, classA
from .config import DEFAULT_NUMERICS, NumericsConfig, threads
from .decoder_backend import IDecoderBackend, JointDecoderBackend, SimpleDecoderBackend
from .entropy import to_bits
from .errors import CapabilityError, InvalidInputError
from .rates import Decoder
from .reports import RateReport, SolverDiagnostics
from .timeshare import TimeSharingDist, quadrature_rule
from .worst import DEFAULT_SOLVER, SolverConfig

logger = logging.getLogger(__name__)

THETA_SAMPLE_POINTS = 11


@dataclass
class CurveData:
    ps: NDArray[np.float64]
    rates_bits: NDArray[np.float64]
    channel: Union[CollusionChannel, ClassDStrategy]
    thetas: Optional[NDArray[np.float64]] = None     # Class D: theta(p) per grid point


class RateManager:
    """
    Owns the decoder backends and routes each request to one of them.
    """

    def __init__(self) -> None:
        self._backends: Dict[str, IDecoderBackend] = {}

        # Register known backends
        self.register_backend(JointDecoderBackend())
        self.register_backend(SimpleDecoderBackend())

    # --------------------------------------------------------------------- #
    # Backend registry
    # --------------------------------------------------------------------- #

    def register_backend(self, backend: IDecoderBackend) -> None:
        self._backends[backend.name] = backend

    def get_backend(self, name: str) -> Optional[IDecoderBackend]:
        return self._backends.get(name)

    def _choose_backend(self, decoder: Decoder, class_tag: ClassTag, c: int,
                        numerics: NumericsConfig) -> IDecoderBackend:
        backend = self._backends.get(Decoder(decoder).value)
        if backend is None:
            raise InvalidInputError(f"no backend registered for decoder {decoder!r}")
        if c < 1:
            raise InvalidInputError(f"invalid collusion size c={c}")
        tag = ClassTag(class_tag)
        if tag != ClassTag.A and c < 2:
            raise InvalidInputError(f"class {tag.value} needs c >= 2")
        cap = backend.max_c(tag, numerics)
        if c > cap:
            raise CapabilityError(
                f"unsupported combination: {backend.name} decoder, class {tag.value}, "
                f"c={c} (supported up to c={cap})"
            )
        return backend

    # --------------------------------------------------------------------- #
    # High-level entry points used by the CLI
    # --------------------------------------------------------------------- #

    def solve(
        self,
        decoder: Decoder,
        class_tag: ClassTag,
        c: int,
        dist: TimeSharingDist,
        cfg: SolverConfig = DEFAULT_SOLVER,
        numerics: NumericsConfig = DEFAULT_NUMERICS,
    ) -> RateReport:
        """Achievable rate of one (decoder, class, pdf, c) cell."""
        tag = ClassTag(class_tag)
        backend = self._choose_backend(decoder, tag, c, numerics)
        node_count = quadrature_rule(dist, numerics).size

        if tag == ClassTag.A:
            ch = classA(c)
            report = RateReport(backend.decoder, tag, dist, c, backend.rate(ch, dist, numerics), ch,
                                SolverDiagnostics(node_count=node_count))
        elif tag == ClassTag.D:
            strategy = backend.worst_classd(c, cfg)
            value = backend.rate_classd(strategy, dist, numerics)
            grid = np.linspace(0.0, 1.0, THETA_SAMPLE_POINTS)
            samples = [[float(p)] + row.tolist() for p, row in zip(grid, strategy.thetas(grid))]
            report = RateReport(backend.decoder, tag, dist, c, value, strategy,
                                SolverDiagnostics(node_count=node_count), theta_samples=samples)
        else:
            info: Dict[str, object] = {}
            ch, value = backend.worst_stationary(c, dist, tag, cfg, numerics, info)
            info.setdefault("node_count", node_count)
            report = RateReport(backend.decoder, tag, dist, c, value, ch, SolverDiagnostics.from_dict(info))

        logger.info("[RATE] %s", report.short_summary())
        return report

    def sweep(
        self,
        decoder: Decoder,
        class_tag: ClassTag,
        cs: Iterable[int],
        dist: TimeSharingDist,
        cfg: SolverConfig = DEFAULT_SOLVER,
        numerics: NumericsConfig = DEFAULT_NUMERICS,
    ) -> List[RateReport]:
        """One report per c, ordered by c whatever the completion order."""
        ordered = sorted(set(int(c) for c in cs))
        for c in ordered:
            self._choose_backend(decoder, ClassTag(class_tag), c, numerics)
        with ThreadPoolExecutor(max_workers=threads()) as pool:
            return list(pool.map(lambda c: self.solve(decoder, class_tag, c, dist, cfg, numerics), ordered))

    def curve(
        self,
        decoder: Decoder,
        class_tag: ClassTag,
        c: int,
        dist: TimeSharingDist,
        grid: int = DEFAULT_NUMERICS.curve_grid,
        cfg: SolverConfig = DEFAULT_SOLVER,
        numerics: NumericsConfig = DEFAULT_NUMERICS,
    ) -> CurveData:
        """
        r(c, p) on a uniform grid of [0, 1]. Classes B/C use the worst
        stationary channel for `dist`; Class D re-evaluates theta(p) per point.
        """
        if grid < 2:
            raise InvalidInputError(f"curve grid needs at least 2 points, got {grid}")
        tag = ClassTag(class_tag)
        backend = self._choose_backend(decoder, tag, c, numerics)
        ps = np.linspace(0.0, 1.0, grid)
        if tag == ClassTag.D:
            strategy = backend.worst_classd(c, cfg)
            thetas = strategy.thetas(ps)
            rates = to_bits(backend.point_rate_nats(thetas, ps, numerics))
            return CurveData(ps, rates, strategy, thetas)
        if tag == ClassTag.A:
            ch = classA(c)
        else:
            ch, _ = backend.worst_stationary(c, dist, tag, cfg, numerics)
        rates = to_bits(backend.point_rate_nats(ch.as_array(), ps, numerics))
        return CurveData(ps, rates, ch)

    def ordering(
        self,
        decoder: Decoder,
        c: int,
        dist: TimeSharingDist,
        cfg: SolverConfig = DEFAULT_SOLVER,
        numerics: NumericsConfig = DEFAULT_NUMERICS,
        classes: Sequence[ClassTag] = tuple(ClassTag),
    ) -> Tuple[RateReport, ...]:
        """Reports for the requested classes (all four by default), from A down to D."""
        tags = sorted({ClassTag(t) for t in classes}, key=list(ClassTag).index)
        for tag in tags:
            self._choose_backend(decoder, tag, c, numerics)
        return tuple(self.solve(decoder, tag, c, dist, cfg, numerics) for tag in tags)


default_rate_manager = RateManager()
