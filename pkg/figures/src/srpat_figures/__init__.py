"""Static figures from srpat CSV outputs; headless, deterministic files."""

__version__ = "0.1.0"

from srpat_figures.render import FigureSpec, SchemaError, render

__all__ = ["FigureSpec", "SchemaError", "render", "__version__"]
