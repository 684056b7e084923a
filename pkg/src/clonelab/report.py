"""Report assembly and byte-stable emission in json, csv and text.

A report is the full record of one CLI invocation: config echo, per-item
results, verdict and exit code.  Identical config and seed must yield
byte-identical output, so emission sorts JSON keys, fixes the CSV line
terminator, and leaves wall-clock time out unless explicitly requested
(the field is then non-null and the run is no longer a golden).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from importlib import resources

from .errors import InputError

TOOL_NAME = "clonelab"

# csv column sets per subcommand; anything else falls back to key/value
CSV_COLUMNS: dict[str, list[str]] = {
    "info": ["field", "value"],
    "clone": ["arity", "complete", "count", "sweeps", "budget"],
    "seq": ["n", "fs", "ht", "len"],
    "bounds": ["n", "name", "lhs", "rhs", "pass"],
    "sigma": ["n", "height", "length", "expected_height"],
    "primal-synth": ["n", "m", "s", "height", "bound"],
    "primality": ["n", "complete", "fs", "full_count", "primal", "len", "len_lower_bound"],
    "malcev": ["status", "height", "term", "clone_size", "clone_complete"],
    "cube": ["n", "arity", "height", "height_bound"],
    "spn": ["degree", "holds", "ops_enumerated", "instances_checked"],
    "rewrite": ["n", "k", "input_height", "output_height", "bound", "verified"],
    "decompose": ["arity", "degree", "output_length", "output_height"],
    "chain": ["k", "arity", "length", "height", "essential_arity"],
    "equiv": ["n", "ht_a", "ht_b"],
    "demo": ["n", "len_commutator_signature", "len_expanded", "exceeds_power", "samples", "agree"],
}


@dataclass
class Report:
    command: str
    config: dict
    results: list[dict]
    status: str = "ok"
    exit_code: int = 0
    wall_ms: float | None = None
    csv_rows: list[dict] | None = None  # when flat csv rows differ from results


def _cell(value) -> str:
    if value is None:
        return ""
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, (list, tuple)):
        return " ".join(str(v) for v in value)
    return str(value)


def _text_lines(value, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                out.append(f"{pad}{k}:")
                _text_lines(v, indent + 1, out)
            else:
                out.append(f"{pad}{k}: {_cell(v)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)):
                out.append(f"{pad}-")
                _text_lines(item, indent + 1, out)
            else:
                out.append(f"{pad}- {_cell(item)}")
    else:
        out.append(f"{pad}{_cell(value)}")


def _tool_version() -> str:
    from clonelab import __version__

    return __version__


def emit(report: Report, fmt: str) -> bytes:
    if fmt == "json":
        payload = {
            "tool": TOOL_NAME,
            "version": _tool_version(),
            "command": report.command,
            "config": report.config,
            "results": report.results,
            "status": report.status,
            "exit_code": report.exit_code,
            "wall_ms": report.wall_ms,
        }
        return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")

    if fmt == "csv":
        columns = CSV_COLUMNS.get(report.command, ["key", "value"])
        rows = report.csv_rows if report.csv_rows is not None else report.results
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(col)) for col in columns])
        return buf.getvalue().encode("utf-8")

    if fmt == "text":
        out = [
            f"{TOOL_NAME} {_tool_version()}",
            f"command: {report.command}",
            "config:",
        ]
        _text_lines(report.config, 1, out)
        out.append(f"status: {report.status}")
        out.append(f"exit code: {report.exit_code}")
        if report.wall_ms is not None:
            out.append(f"wall ms: {report.wall_ms}")
        out.append("results:")
        _text_lines(report.results, 1, out)
        return ("\n".join(out) + "\n").encode("utf-8")

    raise InputError(f"unknown output format {fmt!r} (json, csv, text)")


def load_schema() -> dict:
    """The JSON report schema shipped as package data."""
    text = resources.files("clonelab").joinpath("report_schema.json").read_text("utf-8")
    return json.loads(text)
