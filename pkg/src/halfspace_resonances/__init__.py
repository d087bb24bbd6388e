"""Resonances of the Laplacian on the half-space with one point interaction.

Modules:

* ``model``: characteristic function, Green's functions, resolvent kernel;
* ``solver``: every zero of the characteristic function, classified;
* ``oracle``: argument-principle counting and contour quadrature used as
  an independent check;
* ``lambertw``: multi-branch Lambert W with logarithmic series and tail bounds;
* ``semiclassical``: resonances for -h^2 Laplacian and their inequalities;
* ``expansion``: residues, wave coefficients and the Schroedinger kernel
  expansion;
* ``cli``: command-line front end.
"""
from .model import BoundaryCondition, ModelParams, gamma, gamma_derivative, resolvent_kernel
from .solver import Resonance, ResonanceKind, count_exact, find_all

__all__ = [
    "BoundaryCondition",
    "ModelParams",
    "Resonance",
    "ResonanceKind",
    "count_exact",
    "find_all",
    "gamma",
    "gamma_derivative",
    "resolvent_kernel",
]

__version__ = "0.1.0"
