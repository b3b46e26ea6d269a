"""
Run configuration for the command-line surface and its validation.

Validation mirrors the pre-run checks style: collect every problem as a
ValidationError (message + severity) instead of stopping at the first one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from core.collusion import ClassTag
from core.config import DEFAULT_NUMERICS
from core.errors import InvalidInputError
from core.oracle import MIN_SAMPLES
from core.rates import Decoder
from core.timeshare import parse_dist
from core.worst import SolverConfig

COMMANDS = ("rate", "worst-attack", "curve", "eta", "capacity-d", "mc-check", "tables")
FORMATS = ("csv", "tsv", "json")

# allowed output formats per command
COMMAND_FORMATS = {
    "rate": FORMATS,
    "worst-attack": FORMATS,
    "curve": FORMATS,
    "eta": FORMATS,
    "capacity-d": FORMATS,
    "mc-check": ("json",),
    "tables": ("tsv",),
}


@dataclass
class ValidationError:
    """A configuration problem with a message and severity."""
    message: str
    severity: str  # "error" or "warning"
    option: Optional[str] = None


@dataclass
class RunConfig:
    command: str
    decoder: Decoder = Decoder.JOINT
    classes: List[ClassTag] = field(default_factory=lambda: [ClassTag.A])
    pdf: str = "tardos"
    cs: List[int] = field(default_factory=list)
    out: Optional[str] = None
    fmt: str = "csv"
    solver: SolverConfig = field(default_factory=SolverConfig)
    samples: int = 1_000_000
    seed: int = 0
    grid: int = DEFAULT_NUMERICS.curve_grid
    channel: Optional[str] = None
    plugin: bool = False

    @property
    def class_tag(self) -> ClassTag:
        return self.classes[0]


# commands that accept several classes in one run
MULTI_CLASS_COMMANDS = ("rate", "worst-attack")


def parse_class_list(text: str) -> List[ClassTag]:
    """
    "C" -> [C], "D,a,B,D" -> [A, B, D]; sorted A..D, duplicates collapse.
    """
    parts = [part.strip().upper() for part in text.split(",")]
    try:
        tags = {ClassTag(part) for part in parts}
    except ValueError as exc:
        raise InvalidInputError(f"malformed class list {text!r}; use letters from A,B,C,D") from exc
    return sorted(tags, key=list(ClassTag).index)


def parse_c_range(text: str) -> List[int]:
    """
    "5" -> [5], "2..9" -> [2, ..., 9], "2,4,6" -> [2, 4, 6].
    """
    raw = text.strip()
    try:
        if ".." in raw:
            lo_txt, hi_txt = raw.split("..", 1)
            lo, hi = int(lo_txt), int(hi_txt)
            if hi < lo:
                raise InvalidInputError(f"empty collusion-size range {text!r}")
            return list(range(lo, hi + 1))
        return sorted({int(part) for part in raw.split(",")})
    except ValueError as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"malformed collusion size {text!r}") from exc


def validate_run_config(cfg: RunConfig) -> Tuple[bool, List[ValidationError]]:
    """
    Checks:
    1. command and output format are known and compatible
    2. pdf selector parses
    3. collusion sizes are within the engine caps
    4. solver knobs and Monte-Carlo settings are in range

    Returns:
        (is_valid, list_of_errors)
    """
    errors: List[ValidationError] = []

    if cfg.command not in COMMANDS:
        errors.append(ValidationError(f"unknown command {cfg.command!r}", "error", "command"))
    elif cfg.fmt not in COMMAND_FORMATS[cfg.command]:
        errors.append(ValidationError(
            f"format {cfg.fmt!r} not available for {cfg.command}; use one of "
            f"{', '.join(COMMAND_FORMATS[cfg.command])}",
            "error", "--format",
        ))

    try:
        parse_dist(cfg.pdf)
    except InvalidInputError as exc:
        errors.append(ValidationError(str(exc), "error", "--pdf"))

    cap = DEFAULT_NUMERICS.max_c_closed_form
    for c in cfg.cs:
        if c < 1 or c > cap:
            errors.append(ValidationError(f"collusion size c={c} outside [1, {cap}]", "error", "--c"))

    try:
        cfg.solver.validate()
    except InvalidInputError as exc:
        errors.append(ValidationError(str(exc), "error", "--tol/--restarts"))

    if cfg.command == "mc-check" and cfg.samples < MIN_SAMPLES:
        errors.append(ValidationError(f"--samples must be >= {MIN_SAMPLES}", "error", "--samples"))
    if cfg.command == "curve":
        if cfg.grid < 2:
            errors.append(ValidationError("--grid must be >= 2", "error", "--grid"))
        if len(cfg.cs) != 1:
            errors.append(ValidationError("curve takes a single --c value", "error", "--c"))
    if not cfg.classes:
        errors.append(ValidationError("no collusion class given", "error", "--class"))
    elif len(cfg.classes) > 1 and cfg.command not in MULTI_CLASS_COMMANDS:
        errors.append(ValidationError(
            f"{cfg.command} takes a single class; several are allowed for "
            f"{' and '.join(MULTI_CLASS_COMMANDS)}",
            "error", "--class",
        ))
    if cfg.command == "tables" and cfg.cs:
        errors.append(ValidationError("tables ignores --c", "warning", "--c"))
    if cfg.command == "mc-check" and cfg.solver.restarts < 20 and ClassTag.C in cfg.classes:
        errors.append(ValidationError("fewer than 20 restarts for the reference rate", "warning", "--restarts"))

    is_valid = not any(e.severity == "error" for e in errors)
    return is_valid, errors
