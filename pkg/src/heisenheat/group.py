"""Heisenberg group arithmetic.

Points live on R^(2N+1) and are written eta = (x, y, tau) with x, y in R^N
and tau real.  The group law is

    (x, y, tau) o (x', y', tau')
        = (x + x', y + y', tau + tau' + 2 (<x, y'> - <x', y>)),

non-commutative, with identity (0, 0, 0) and inverse (-x, -y, -tau).  The
anisotropic dilations delta_lam(eta) = (lam x, lam y, lam^2 tau) are group
automorphisms and scale Lebesgue measure by lam^Q, where Q = 2N + 2 is the
homogeneous dimension.  The gauge

    |eta|_H = ((|x|^2 + |y|^2)^2 + tau^2)^(1/4)

is homogeneous of degree one under the dilations, symmetric under inversion,
and vanishes only at the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GroupDims",
    "GroupPoint",
    "point",
    "group_identity",
    "group_mul",
    "group_inverse",
    "gauge_norm",
    "dilate",
]


@dataclass(frozen=True)
class GroupDims:
    """Dimensional bookkeeping for H^N.

    q is the homogeneous dimension 2N + 2.  p_fujita = 1 + 2/Q separates
    the blow-up range from the existence range for the unforced problem;
    p_critical = Q/(Q - 2) plays that role for the forced one.
    """

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")

    @property
    def q(self) -> int:
        return 2 * self.n + 2

    @property
    def p_fujita(self) -> float:
        return 1.0 + 2.0 / self.q

    @property
    def p_critical(self) -> float:
        return self.q / (self.q - 2.0)


@dataclass(frozen=True)
class GroupPoint:
    """A point (x, y, tau) of H^N; x and y are length-N float arrays."""

    x: np.ndarray
    y: np.ndarray
    tau: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "tau", float(self.tau))
        if x.ndim != 1 or y.ndim != 1:
            raise ValueError("x and y must be one-dimensional")
        if x.shape != y.shape:
            raise ValueError(f"x and y lengths differ: {x.shape} vs {y.shape}")
        if x.size < 1:
            raise ValueError("x and y must have at least one component")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and math.isfinite(self.tau)):
            raise ValueError("group point components must be finite")

    @property
    def n(self) -> int:
        return self.x.size


def point(x: float, y: float, tau: float) -> GroupPoint:
    """Convenience constructor for N = 1 points from scalars."""
    return GroupPoint(np.array([float(x)]), np.array([float(y)]), tau)


def group_identity(n: int) -> GroupPoint:
    return GroupPoint(np.zeros(n), np.zeros(n), 0.0)


def _check_same_n(a: GroupPoint, b: GroupPoint) -> None:
    if a.n != b.n:
        raise ValueError(f"points live on different groups: N={a.n} vs N={b.n}")


def group_mul(a: GroupPoint, b: GroupPoint) -> GroupPoint:
    _check_same_n(a, b)
    twist = 2.0 * (float(np.dot(a.x, b.y)) - float(np.dot(b.x, a.y)))
    return GroupPoint(a.x + b.x, a.y + b.y, a.tau + b.tau + twist)


def group_inverse(a: GroupPoint) -> GroupPoint:
    return GroupPoint(-a.x, -a.y, -a.tau)


def gauge_norm(a: GroupPoint) -> float:
    z2 = float(np.dot(a.x, a.x) + np.dot(a.y, a.y))
    return (z2 * z2 + a.tau * a.tau) ** 0.25


def dilate(a: GroupPoint, lam: float) -> GroupPoint:
    if not (isinstance(lam, (int, float)) and math.isfinite(lam) and lam > 0.0):
        raise ValueError(f"dilation parameter must be finite and positive, got {lam!r}")
    lam = float(lam)
    return GroupPoint(lam * a.x, lam * a.y, lam * lam * a.tau)
