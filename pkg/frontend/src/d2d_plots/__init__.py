from .figures import FIGURE_SPECS, FigureSpec, SchemaError, read_rows, render

__version__ = "0.1.0"

__all__ = ["FIGURE_SPECS", "FigureSpec", "SchemaError", "read_rows", "render",
           "__version__"]
