"""Exact q-differential calculus: q-differential algebras, the universal
q-differential envelope, q-Hochschild cochains and generalized cohomology
of N-complexes."""

__version__ = "0.1.0"
