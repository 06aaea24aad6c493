"""Shared fixtures: fresh desk-scale manifests produced through the solver CLI.

The figure pipeline consumes the solver only through its command line and
file formats, so the fixtures shell out to `python -m vskinetic`.
"""

import subprocess
import sys
from pathlib import Path

import pytest

FAST_FLAGS = ["--nx", "24", "--nxi", "12", "--tfinal", "0.05"]


def run_cli(*args: str) -> None:
    proc = subprocess.run(
        [sys.executable, "-m", "vskinetic", *args], capture_output=True, text=True
    )
    if proc.returncode != 0:
        raise RuntimeError(f"solver CLI failed: {proc.stderr}")


@pytest.fixture(scope="session")
def manifests(tmp_path_factory) -> dict[str, Path]:
    """One fresh manifest per study preset, at reduced size and horizon."""
    base = tmp_path_factory.mktemp("solver-runs")
    out = {}
    for preset in ("ex1-nonosc", "ex2-consistency", "ex3-ap", "ex4-application"):
        target = base / preset
        run_cli("run", "--preset", preset, *FAST_FLAGS, "--out", str(target))
        out[preset] = target / "manifest.json"
    return out
