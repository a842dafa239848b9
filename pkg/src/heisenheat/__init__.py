"""Finite-difference laboratory for the forced semilinear heat equation

    u_t - L u = |u|^p + f

on Heisenberg groups H^N, where L is the sub-Laplacian.  The package
provides the group arithmetic, grids and quadrature, discrete sub-Laplacian
stencils, time integrators with blow-up detection, and the cutoff-function
integrals used to probe the critical exponent p = Q/(Q-2) and lifespan
scaling of small-data solutions.
"""

__version__ = "0.1.0"
