"""Numerical laboratory for the Camassa-Holm equation and related non-local models."""

from .fields import Circle, Field, Grid, Line, circle_grid, line_grid
from .model import BFamily, General

__all__ = ["BFamily", "Circle", "Field", "General", "Grid", "Line", "circle_grid", "line_grid"]
__version__ = "0.1.0"
