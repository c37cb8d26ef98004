"""Cutoff Boltzmann gain-term estimates: operators, exponent algebra and solvers."""

__version__ = "0.1.0"
