"""Numerical lab for Heinz and Heron means of scalars, matrices and convex functionals."""

from .core import POS_INF, GridFn, LabError
from .lab import Report, SweepConfig

__all__ = ["POS_INF", "GridFn", "LabError", "Report", "SweepConfig"]
__version__ = "0.1.0"
