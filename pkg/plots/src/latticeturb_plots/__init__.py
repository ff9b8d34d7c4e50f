"""Figure rendering for latticeturb CSV outputs.

Consumes only the documented CSV schemas; never recomputes physics.
"""

from .figures import FIGURE_KINDS, FigureSpec, RenderResult, render
from .io import SchemaError, read_columns

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "RenderResult",
    "SchemaError",
    "read_columns",
    "render",
]
