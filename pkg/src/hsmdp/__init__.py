"""Horseshoe-prior numerics and sparse-testing experiments."""

__version__ = "0.1.0"

from .backend import BACKEND

__all__ = ["BACKEND", "__version__"]
