"""Monte Carlo laboratory for a randomly-driven absorbing front.

Simulates independent lattice walkers consumed by an advancing front under
several absorption rules, verifies the exact flux and decomposition
identities, and reproduces the diffusive, explosive and critical phases at
desk scale, including the jump-structured scaling limit of the critical
front.
"""

from . import initcond, kernels, limitlaw, simulate, stefan, stepfn
from .stepfn import StepFunction, invert

__version__ = "0.1.0"

__all__ = [
    "StepFunction",
    "invert",
    "initcond",
    "kernels",
    "limitlaw",
    "simulate",
    "stefan",
    "stepfn",
]
