"""Vortex-blob simulation of concentrated axisymmetric vortex rings."""

from ._backend import backend_name
from .errors import ConfigurationError, ConvergenceError, DomainError, NumericalAbort
from .halfplane_kernel import HalfPlanePoint, KernelSplit, PlaneVector
from .quadrature import QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "ConvergenceError", "DomainError", "HalfPlanePoint",
    "KernelSplit", "NumericalAbort", "PlaneVector", "QuadratureSpec", "backend_name",
]
