"""Numerical laboratory for relativistic wave-operator symmetry algebras.

The package constructs the Dirac and free-field (photon) Hamiltonians, four
families of symmetry generator sets in both the original and the
energy-diagonal representation, and verifies every claimed invariance,
commutation relation and unitary equivalence by two independent computational
routes: exact operator calculus on momentum-space symbols, and spectral
evolution of wave packets on a periodic grid.
"""

__version__ = "0.1.0"
