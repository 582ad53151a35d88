"""effishim: measurement shim for running subject programs under limits."""

from .shim import main, shim_run

__version__ = "0.1.0"

__all__ = ["main", "shim_run", "__version__"]
