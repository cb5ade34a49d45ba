"""Discrete-time signal-state dynamics on rank-growing Heisenberg nets."""

__version__ = "0.1.0"
