"""Measure-geometry constants and gauge-polar helpers.

For z-rotation-invariant integrands on H^N, Lebesgue measure reduces to
sigma_2N r^(2N-1) dr dtau with sigma_2N = 2 pi^N / (N-1)!.  In gauge-polar
coordinates r = g sqrt(cos a), tau = g^2 sin a (g >= 0, |a| < pi/2) the
same measure is sigma_2N g^(Q-1) cos^(N-1) a dg da, so gauge-radial
integrals factor into a 1-D radial part and closed-form angular moments

    integral of cos^m over (-pi/2, pi/2) = sqrt(pi) Gamma((m+1)/2) / Gamma(m/2 + 1).

The volume of the gauge ball {|eta|_H <= R} is c_Q R^Q with
c_Q = sigma_2N * moment(N-1) / Q; for N = 1 this is pi^2/2.
"""

from __future__ import annotations

import math

from .group import GroupDims

__all__ = [
    "sphere_factor",
    "cos_power_integral",
    "angular_moment",
    "gauge_ball_volume_constant",
]


def sphere_factor(n: int) -> float:
    """Surface measure of the unit sphere in the 2N-dimensional z block."""
    return 2.0 * math.pi**n / math.factorial(n - 1)


def cos_power_integral(m: float) -> float:
    """Integral of cos^m(a) over (-pi/2, pi/2), for any m > -1."""
    if m <= -1.0:
        raise ValueError(f"cosine power must exceed -1, got {m}")
    return math.sqrt(math.pi) * math.gamma((m + 1.0) / 2.0) / math.gamma(m / 2.0 + 1.0)


def angular_moment(dims: GroupDims, extra: float = 0.0) -> float:
    """sigma_2N times the angular integral of cos^(N-1+extra)."""
    return sphere_factor(dims.n) * cos_power_integral(dims.n - 1.0 + extra)


def gauge_ball_volume_constant(dims: GroupDims) -> float:
    return angular_moment(dims) / dims.q
