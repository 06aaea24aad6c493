"""Readers for the solver's output formats.

Implemented against the documented file layout (manifest JSON; diagnostics
CSV with a named header row; snapshot CSV with one '#' metadata line), not
against the solver package, so this component depends only on the files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Manifest:
    path: Path
    data: dict

    @property
    def base_dir(self) -> Path:
        return self.path.parent

    @property
    def preset(self) -> str:
        return self.data.get("preset", "?")

    @property
    def provenance(self) -> str:
        return self.data.get("provenance", "unknown provenance")

    def runs(self, kind: str | None = None) -> list[dict]:
        runs = self.data.get("runs", [])
        if kind is None:
            return runs
        return [r for r in runs if r.get("kind") == kind]

    def resolve(self, relative: str) -> Path:
        path = self.base_dir / relative
        if not path.exists():
            raise FileNotFoundError(
                f"manifest {self.path} references missing file {relative!r}"
            )
        return path


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no manifest at {path}")
    return Manifest(path, json.loads(path.read_text()))


def read_diagnostics(path: Path) -> dict[str, np.ndarray]:
    """Diagnostics CSV as named columns; empty arrays when only a header."""
    lines = Path(path).read_text().strip().splitlines()
    names = lines[0].split(",")
    if len(lines) == 1:
        return {name: np.empty(0) for name in names}
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return {name: data[:, k] for k, name in enumerate(names)}


def _parse_meta(line: str) -> dict:
    meta = {}
    for token in line.lstrip("# ").split():
        key, _, raw = token.partition("=")
        try:
            meta[key] = int(raw) if raw.lstrip("+-").isdigit() else float(raw)
        except ValueError:
            meta[key] = raw
    return meta


def read_snapshot(path: Path) -> tuple[dict, np.ndarray]:
    lines = Path(path).read_text().strip().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError(f"{path}: not a snapshot file (missing metadata line)")
    meta = _parse_meta(lines[0])
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return meta, data


def profile_columns(path: Path) -> tuple[dict, dict[str, np.ndarray]]:
    meta, data = read_snapshot(path)
    if meta.get("kind") != "profile":
        raise ValueError(f"{path}: expected a profile snapshot, got {meta.get('kind')!r}")
    names = str(meta["columns"]).split(",")
    return meta, {name: data[:, k] for k, name in enumerate(names)}


def same_x_grid(meta_a: dict, meta_b: dict) -> bool:
    return all(meta_a.get(k) == meta_b.get(k) for k in ("n_x", "x_lo", "x_hi"))
