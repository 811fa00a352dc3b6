"""Invariant representative functions for SU(2) lattice gauge theory.

Spin-network bases on SU(2)^N, the multiplication law of the invariant
algebra, orbit-type costratification subspaces, and the Kogut-Susskind
eigenproblem reduced to sparse linear algebra.

All spins on every API surface are *twice-values* (integers): tj = 2j.
"""

__version__ = "0.1.0"
