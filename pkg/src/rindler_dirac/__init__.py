"""Dirac fermions in a uniformly accelerated (Rindler) frame, 1+1 dimensions."""

__version__ = "0.1.0"

from .geometry import RindlerFrame  # noqa: E402
from .reduction import Kind, Sector  # noqa: E402

__all__ = ["RindlerFrame", "Kind", "Sector", "__version__"]
