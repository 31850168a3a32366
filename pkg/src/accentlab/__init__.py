"""accentlab: a desk-scale accent recognition and conversion lab."""

__version__ = "0.1.0"

from . import dsp, engine, errors

__all__ = ["dsp", "engine", "errors", "__version__"]
