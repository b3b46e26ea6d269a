from __future__ import annotations

"""
Decoder backend abstractions.

- IDecoderBackend: what every decoder-specific rate engine must provide.
- JointDecoderBackend: rates of I(Y; X_C | P)/c, BA solver, closed-form Class D.
- SimpleDecoderBackend: rates of I(Y; X | P), multistart solver, line-search Class D.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from .collusion import ClassDStrategy, ClassTag, CollusionChannel
from .config import DEFAULT_NUMERICS, NumericsConfig
from .errors import InvalidInputError
from .rates import Decoder, point_nats, rate, rate_classd
from .timeshare import TimeSharingDist
from .worst import (
    SolverConfig,
    worst_joint_bc,
    worst_joint_classb,
    worst_joint_classd,
    worst_simple_bc,
    worst_simple_classb,
    worst_simple_classd,
)


class IDecoderBackend(ABC):
    """
    Common interface for the two decoders.

    The rest of the app talks to this interface through the RateManager,
    never to a solver module directly.
    """

    name: str
    decoder: Decoder

    def point_rate_nats(self, thetas: NDArray[np.float64], ps: NDArray[np.float64],
                        numerics: NumericsConfig = DEFAULT_NUMERICS) -> NDArray[np.float64]:
        return point_nats(self.decoder, thetas, ps, numerics)

    def rate(self, ch: CollusionChannel, dist: TimeSharingDist,
             numerics: NumericsConfig = DEFAULT_NUMERICS) -> float:
        return rate(self.decoder, ch, dist, numerics)

    def rate_classd(self, strategy: ClassDStrategy, dist: TimeSharingDist,
                    numerics: NumericsConfig = DEFAULT_NUMERICS) -> float:
        return rate_classd(strategy, self.decoder, dist, numerics)

    @abstractmethod
    def max_c(self, class_tag: ClassTag, numerics: NumericsConfig = DEFAULT_NUMERICS) -> int:
        """Largest collusion size the backend accepts for this class."""
        raise NotImplementedError

    @abstractmethod
    def worst_stationary(
        self,
        c: int,
        dist: TimeSharingDist,
        class_tag: ClassTag,
        cfg: SolverConfig,
        numerics: NumericsConfig = DEFAULT_NUMERICS,
        diagnostics_out: Optional[Dict[str, Any]] = None,
    ) -> Tuple[CollusionChannel, float]:
        """Worst Class-B or Class-C channel and its rate in bits."""
        raise NotImplementedError

    @abstractmethod
    def worst_classd(self, c: int, cfg: SolverConfig) -> ClassDStrategy:
        raise NotImplementedError


def _stationary_only(class_tag: ClassTag) -> ClassTag:
    tag = ClassTag(class_tag)
    if tag not in (ClassTag.B, ClassTag.C):
        raise InvalidInputError(f"worst_stationary handles classes B and C, got {tag.value}")
    return tag


class JointDecoderBackend(IDecoderBackend):
    name = "joint"
    decoder = Decoder.JOINT

    def max_c(self, class_tag: ClassTag, numerics: NumericsConfig = DEFAULT_NUMERICS) -> int:
        if ClassTag(class_tag) in (ClassTag.B, ClassTag.C):
            return numerics.max_c_ba
        return numerics.max_c_closed_form

    def worst_stationary(self, c, dist, class_tag, cfg, numerics=DEFAULT_NUMERICS, diagnostics_out=None):
        if _stationary_only(class_tag) == ClassTag.B:
            return worst_joint_classb(c, dist, cfg, numerics, diagnostics_out)
        return worst_joint_bc(c, dist, cfg, numerics, diagnostics_out)

    def worst_classd(self, c: int, cfg: SolverConfig) -> ClassDStrategy:
        return worst_joint_classd(c)


class SimpleDecoderBackend(IDecoderBackend):
    name = "simple"
    decoder = Decoder.SIMPLE

    def max_c(self, class_tag: ClassTag, numerics: NumericsConfig = DEFAULT_NUMERICS) -> int:
        if ClassTag(class_tag) in (ClassTag.B, ClassTag.C):
            return numerics.max_c_simple_bc
        return numerics.max_c_closed_form

    def worst_stationary(self, c, dist, class_tag, cfg, numerics=DEFAULT_NUMERICS, diagnostics_out=None):
        if _stationary_only(class_tag) == ClassTag.B:
            return worst_simple_classb(c, dist, cfg, numerics, diagnostics_out)
        return worst_simple_bc(c, dist, cfg, numerics, diagnostics_out)

    def worst_classd(self, c: int, cfg: SolverConfig) -> ClassDStrategy:
        return worst_simple_classd(c, cfg)
