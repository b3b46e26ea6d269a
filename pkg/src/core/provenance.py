"""
Provenance banners.

Every output file starts with the settings that produced its numbers:
command, node counts, tolerances, solver knobs, seeds. The same lines are
logged as a banner when a command starts.
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional

from .config import DEFAULT_NUMERICS, NumericsConfig
from .worst import DEFAULT_SOLVER, SolverConfig

TOOL_NAME = "collrates"
TOOL_VERSION = "0.1.0"


def provenance_fields(
    command: str,
    numerics: NumericsConfig = DEFAULT_NUMERICS,
    solver: SolverConfig = DEFAULT_SOLVER,
    extra: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    fields: Dict[str, Any] = {"tool": f"{TOOL_NAME} {TOOL_VERSION}", "command": command}
    fields.update({f"numerics.{k}": v for k, v in numerics.as_dict().items()})
    fields.update({f"solver.{k}": v for k, v in solver.as_dict().items()})
    for key, value in (extra or {}).items():
        fields[key] = value
    return fields


def provenance_line(fields: Dict[str, Any]) -> str:
    """Single `key=value` line, order preserved."""
    return " ".join(f"{k}={v}" for k, v in fields.items())


def generate_provenance_banner(fields: Dict[str, Any]) -> str:
    """
    Multi-line banner for logging.

    Returns:
        Banner text framed by rules of '='.
    """
    lines: List[str] = []
    lines.append("=" * 60)
    lines.append("Run Provenance")
    lines.append("=" * 60)
    for key, value in fields.items():
        lines.append(f"{key}: {value}")
    lines.append("=" * 60)
    lines.append("")
    return "\n".join(lines)
