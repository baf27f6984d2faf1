"""Chen-Fliess series whose coefficients are differential operators in the
system parameters: word/operator algebra, parallel and series
interconnections, numerical evaluation of the induced input-output maps,
convergence bounds, and series solutions of transport and wave Cauchy
problems."""

from . import bounds, diffop, expr, iterint, pde, series, words
from .diffop import DiffOp
from .iterint import Grid, GridField, InputSignal, evaluate_series
from .series import GenSeries, NotLinear, OverlappingSupport
from .words import Letter, Word

__version__ = "0.1.0"

__all__ = [
    "bounds", "diffop", "expr", "iterint", "pde", "series", "words",
    "DiffOp", "Grid", "GridField", "InputSignal", "evaluate_series",
    "GenSeries", "NotLinear", "OverlappingSupport", "Letter", "Word",
]
