from __future__ import annotations

"""
Result records for rate computations.

A RateReport is what every CLI row is built from: which decoder and class
were evaluated, under which pdf, the rate in bits, the attack that reaches
it, and how the solver got there.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

from .collusion import ClassDStrategy, ClassTag, CollusionChannel
from .errors import InternalInvariantError
from .rates import Decoder
from .timeshare import TimeSharingDist

_NEGATIVE_TOL = 1e-12


@dataclass
class SolverDiagnostics:
    """
    How a rate was obtained. Closed forms and fixed channels report zero
    iterations; `extra` carries solver-specific keys (restart endpoints,
    full-box vs Class-B gaps, fixed-point residuals).
    """

    iterations: int = 0
    final_gap_bits: float = 0.0
    node_count: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, info: Dict[str, Any]) -> "SolverDiagnostics":
        known = {"iterations", "final_gap_bits", "node_count"}
        return cls(
            iterations=int(info.get("iterations", 0)),
            final_gap_bits=float(info.get("final_gap_bits", 0.0)),
            node_count=int(info.get("node_count", 0)),
            extra={k: v for k, v in info.items() if k not in known},
        )


@dataclass
class RateReport:
    decoder: Decoder
    class_tag: ClassTag
    dist: TimeSharingDist
    c: int
    rate_bits: float
    channel: Union[CollusionChannel, ClassDStrategy]
    diagnostics: SolverDiagnostics = field(default_factory=SolverDiagnostics)
    # Class D only: (p, theta(p)) samples for output
    theta_samples: Optional[List[List[float]]] = None

    def __post_init__(self) -> None:
        if self.rate_bits < -_NEGATIVE_TOL:
            raise InternalInvariantError(
                f"negative rate {self.rate_bits!r} for {self.decoder.value}/{self.class_tag.value} c={self.c}"
            )
        self.rate_bits = max(0.0, float(self.rate_bits))

    def theta_text(self, digits: Optional[int] = None) -> str:
        if isinstance(self.channel, CollusionChannel):
            return self.channel.to_text(digits)
        return f"theta(p):{self.channel.kind.value}"

    def short_summary(self) -> str:
        """One-line summary suitable for logs."""
        return (
            f"{self.decoder.value}/{self.class_tag.value} c={self.c} "
            f"pdf={self.dist.selector()}: {self.rate_bits:.6f} bits"
        )
