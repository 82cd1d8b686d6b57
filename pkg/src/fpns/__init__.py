"""Deterministic kinetic-fluid laboratory for locally averaged alignment
dynamics coupled to incompressible flow on the periodic torus."""

__version__ = "0.1.0"

from .grids import Grids, TorusGrid, VelocityGrid, make_grids
from .averaging import Model, ModelSpec, make_model
from .kinetic import DriftField, StepSizeError

__all__ = [
    "Grids",
    "TorusGrid",
    "VelocityGrid",
    "make_grids",
    "Model",
    "ModelSpec",
    "make_model",
    "DriftField",
    "StepSizeError",
    "__version__",
]
