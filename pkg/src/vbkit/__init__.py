"""Exact symbolic checks for weighted monoid actions, double vector bundles,
Lie algebroids, VB-algebroids and VB-groupoids over polynomial charts."""

from .scalar import KERNEL, LAMBDA, Scalar

__version__ = "0.1.0"

__all__ = ["KERNEL", "LAMBDA", "Scalar", "__version__"]
