"""Weyl transform, Schrödinger representation and lattice-induced realizations
of the Heisenberg group, with a numerical finite-support/finite-rank study."""

__version__ = "0.1.0"
