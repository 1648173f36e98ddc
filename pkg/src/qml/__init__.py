"""Exact-arithmetic toolkit for the Landau-Ginzburg mirror of even quadrics.

Subpackages are layered bottom-up: algebra (scalar and polynomial rings),
linalg (exact elimination), lgmodel (charts, critical geometry), milnor
(Jacobian ring vs small quantum ring), pfode (hbar-difference operators and
Picard-Fuchs reduction), series (branch solutions, flat images, monodromy),
frobenius (correlators, WDVV, stationary-phase pairings), cli.
"""

__version__ = "0.1.0"

__all__ = [
    "algebra",
    "linalg",
    "lgmodel",
    "milnor",
    "pfode",
    "series",
    "frobenius",
    "cli",
]
