"""Heat kernels, heat-kernel expansion profiles and stationarity diagnostics on graphs."""

from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # pragma: no cover - source checkout without install
    __version__ = "0.1.0"

from .errors import HeatlabError
from .graphs import GeneratorSpec, RootedGraph, ball, default_root, distances, make_generator
from .heat import VertexMeasure, flattening_curve, heat_kernel, monte_carlo_kernel

__all__ = [
    "GeneratorSpec",
    "HeatlabError",
    "RootedGraph",
    "VertexMeasure",
    "__version__",
    "ball",
    "default_root",
    "distances",
    "flattening_curve",
    "heat_kernel",
    "make_generator",
    "monte_carlo_kernel",
]
