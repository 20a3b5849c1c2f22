"""Numerical toolkit for collars, standard maps and convergence in augmented
Teichmüller space."""

__version__ = "0.1.0"
