"""Discrete octonionic function theory on bounded subsets of the lattice hZ^8."""

__version__ = "0.1.0"
