"""Figure regeneration from simulation run manifests.

Reads the delimited outputs of the kinetic solver CLI (manifest JSON,
diagnostics CSV, snapshot CSV) and renders the four study figures. Strictly
read-only with respect to simulation outputs.
"""

__version__ = "0.1.0"

from .render import FIGURE_KINDS, render

__all__ = ["FIGURE_KINDS", "render", "__version__"]
