"""Finite-dimensional reductions of the Hamiltonian action functional on flat models."""

__version__ = "0.1.0"
