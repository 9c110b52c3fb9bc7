"""Micro-rotation patterning in the reduced 2D Cosserat shear problem."""
from .params import MaterialParams, ShearDrive, SlipSystem, validate
from .field import BoundarySpec, Grid2D, ScalarField

__version__ = "0.1.0"
__all__ = ["MaterialParams", "ShearDrive", "SlipSystem", "validate",
           "BoundarySpec", "Grid2D", "ScalarField"]
