"""Numerical companion for the Hausdorff dimension of quadratic Julia sets
near the Mandelbrot tip c = -2 and near c = 0."""

__version__ = "0.1.0"
