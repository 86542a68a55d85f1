"""Exact conjugates of bivariate piecewise linear-quadratic functions."""
from .core import LinFn, QuadFn, RationalFn, Surd
from .errors import PLQError
from .geometry import ParabolicInequality, ParabolicRegion, Polytope, hull_and_orient
from .plqmodel import PiecewiseFn, PLQFunction, load, save
from .envelope import envelope_piece
from .maxconj import conjugate_plq

__all__ = [
    "LinFn", "QuadFn", "RationalFn", "Surd", "PLQError",
    "ParabolicInequality", "ParabolicRegion", "Polytope", "hull_and_orient",
    "PiecewiseFn", "PLQFunction", "load", "save",
    "envelope_piece", "conjugate_plq",
]
__version__ = "0.1.0"
