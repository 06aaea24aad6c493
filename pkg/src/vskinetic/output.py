"""File formats for experiment output.

Everything numeric is delimited text at 17 significant digits, so doubles
round-trip bit-exactly and the files diff cleanly. Field snapshots carry one
leading comment line with the grid metadata; the run manifest is a single
JSON document holding every parameter plus provenance.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .diagnostics import DiagnosticsRecord

FLOAT_FMT = "%.17g"


def format_floats(values) -> str:
    return ",".join(FLOAT_FMT % v for v in np.atleast_1d(values))


def write_diagnostics_csv(path: Path, records: list[DiagnosticsRecord]) -> None:
    names = DiagnosticsRecord.field_names()
    lines = [",".join(names)]
    for rec in records:
        lines.append(format_floats(rec.as_row()))
    Path(path).write_text("\n".join(lines) + "\n")


def read_diagnostics_csv(path: Path) -> tuple[list[str], np.ndarray]:
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    if len(text) == 1:
        return header, np.empty((0, len(header)))
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    return header, data


def _meta_line(meta: dict) -> str:
    parts = []
    for key, value in meta.items():
        if isinstance(value, float):
            parts.append(f"{key}={FLOAT_FMT % value}")
        else:
            parts.append(f"{key}={value}")
    return "# " + " ".join(parts)


def _parse_meta(line: str) -> dict:
    meta = {}
    for token in line.lstrip("# ").split():
        key, _, raw = token.partition("=")
        try:
            meta[key] = int(raw) if raw.lstrip("+-").isdigit() else float(raw)
        except ValueError:
            meta[key] = raw
    return meta


def write_phase_snapshot(path: Path, values: np.ndarray, meta: dict) -> None:
    """Phase-space matrix (n_x rows, velocity columns) under one metadata line."""
    lines = [_meta_line({"kind": "phase", **meta})]
    lines.extend(format_floats(row) for row in values)
    Path(path).write_text("\n".join(lines) + "\n")


def write_profile_snapshot(path: Path, columns: dict[str, np.ndarray], meta: dict) -> None:
    """Macroscopic x-profiles as named columns under one metadata line."""
    names = list(columns)
    lines = [_meta_line({"kind": "profile", **meta, "columns": ",".join(names)})]
    stacked = np.column_stack([columns[name] for name in names])
    lines.extend(format_floats(row) for row in stacked)
    Path(path).write_text("\n".join(lines) + "\n")


def read_snapshot(path: Path) -> tuple[dict, np.ndarray]:
    """Read either snapshot kind; returns (metadata, data matrix)."""
    text = Path(path).read_text().strip().splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError(f"{path}: missing snapshot metadata line")
    meta = _parse_meta(text[0])
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    return meta, data


def profile_column(path: Path, name: str) -> np.ndarray:
    meta, data = read_snapshot(path)
    names = str(meta.get("columns", "")).split(",")
    if name not in names:
        raise ValueError(f"{path}: no column {name!r} (has {names})")
    return data[:, names.index(name)]


def write_manifest(path: Path, manifest: dict) -> None:
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_manifest(path: Path) -> dict:
    return json.loads(Path(path).read_text())
