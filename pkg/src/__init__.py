"""Oscillatory Jacobi Lab - spectral experiments for oscillatory Jacobi matrices and Schrödinger operators"""

__version__ = "0.1.0"
