"""
Writers for CSV / TSV / JSON outputs.

CSV and TSV start with one `#` provenance comment line, then the header,
then one row per record. JSON carries the provenance under "provenance".
Output is byte-stable for a fixed configuration.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from core.provenance import provenance_line


def _fmt_cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_rows(
    header: Sequence[str],
    rows: Sequence[Sequence[Any]],
    fmt: str,
    provenance: Dict[str, Any],
) -> str:
    if fmt == "json":
        payload = {
            "provenance": provenance,
            "rows": [dict(zip(header, row)) for row in rows],
        }
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"

    buf = io.StringIO()
    buf.write(f"# {provenance_line(provenance)}\n")
    writer = csv.writer(buf, delimiter="\t" if fmt == "tsv" else ",", lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt_cell(v) for v in row])
    return buf.getvalue()


def render_object(obj: Dict[str, Any], provenance: Dict[str, Any]) -> str:
    payload = dict(obj)
    payload["provenance"] = provenance
    return json.dumps(payload, indent=2) + "\n"


def emit(text: str, out: Optional[str]) -> None:
    """Write to `out`, or stdout when `out` is None or '-'."""
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def read_rows(text: str, fmt: str) -> List[Dict[str, str]]:
    """Parse text produced by `render_rows` back into dicts (schema checks, tests)."""
    if fmt == "json":
        return [{k: v for k, v in row.items()} for row in json.loads(text)["rows"]]
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    reader = csv.DictReader(lines, delimiter="\t" if fmt == "tsv" else ",")
    return list(reader)
