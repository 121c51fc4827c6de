"""Harmonic oscillator on a time-dependent noncommutative plane.

Modules: :mod:`background` (fields and Hamiltonian coefficients), :mod:`ep`
(Ermakov-Pinney solutions), :mod:`special_fn` (Bessel and U functions),
:mod:`states` (invariant eigenfunctions and residual checks),
:mod:`expectations` (matrix elements and uncertainty relations),
:mod:`coherent` (Glauber, squeezed, Gaussian Klauder states) and the
:mod:`harness` command line.
"""

__version__ = "0.1.0"
