"""Exact Lie algebras, numeric group laws and loop checks for low-dimensional
multiplication groups of topological loops."""

from . import exprdsl, groupcat, kepka, liealg, loopcore, numerics
from .report import Report

__version__ = "0.1.0"

__all__ = ["Report", "exprdsl", "groupcat", "kepka", "liealg", "loopcore", "numerics", "__version__"]
