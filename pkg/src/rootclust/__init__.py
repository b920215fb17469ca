"""Certified clustering of the complex roots of a polynomial in a box.

The main entry point is :func:`rootclust.solver.solve`::

    from rootclust import from_roots, solve
    F = from_roots([(1, 3), (-1, 1)])
    result = solve(F, (0, 4), "2^-10")
"""

from .dyadic import Ball, ComplexDyadic, Dyadic
from .geometry import Disc
from .oracle import OraclePolynomial, PrecisionExhausted, from_exact, from_roots
from .solver import Cluster, solve

__all__ = ["Ball", "Cluster", "ComplexDyadic", "Disc", "Dyadic", "OraclePolynomial",
           "PrecisionExhausted", "from_exact", "from_roots", "solve"]
__version__ = "0.1.0"
