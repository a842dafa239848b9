"""NumPy reference implementations of the stencil kernels.

Every kernel writes into a caller-supplied `out` array and treats values
one node beyond the array as zero (homogeneous Dirichlet ghost nodes),
with one exception: the cylinder axis r = 0 is a coordinate artifact, so
the centered cylindrical stencil uses an even-reflection ghost there
(ghost value = value at the first node).  The flux-form cylindrical
stencil needs no axis ghost: its inner face coefficient vanishes at j = 0.

The compiled backend in _stencils.pyx mirrors these functions statement
for statement; parity between the two is enforced by tests.
"""

from __future__ import annotations

import numpy as np

__all__ = ["box_direct", "box_composed", "cyl_centered", "cyl_flux"]


def _pad3(u: np.ndarray) -> np.ndarray:
    up = np.zeros((u.shape[0] + 2, u.shape[1] + 2, u.shape[2] + 2))
    up[1:-1, 1:-1, 1:-1] = u
    return up


def box_direct(u, x, y, hx, hy, ht, mixed_sign, out) -> None:
    """Direct-form stencil on H^1:

        u_xx + u_yy + 4 (x^2 + y^2) u_tt + 4 y u_xt - 4 x u_yt,

    with centered second differences and centered cross differences.
    `mixed_sign` multiplies the -4 x u_yt coefficient; it is 1.0 for the
    correct operator and exists as a fault-injection hook for validation
    tooling (a wrong sign breaks dilation covariance detectably).
    """
    up = _pad3(u)
    c = up[1:-1, 1:-1, 1:-1]
    uxx = (up[2:, 1:-1, 1:-1] - 2.0 * c + up[:-2, 1:-1, 1:-1]) / (hx * hx)
    uyy = (up[1:-1, 2:, 1:-1] - 2.0 * c + up[1:-1, :-2, 1:-1]) / (hy * hy)
    utt = (up[1:-1, 1:-1, 2:] - 2.0 * c + up[1:-1, 1:-1, :-2]) / (ht * ht)
    uxt = (
        up[2:, 1:-1, 2:] - up[2:, 1:-1, :-2] - up[:-2, 1:-1, 2:] + up[:-2, 1:-1, :-2]
    ) / (4.0 * hx * ht)
    uyt = (
        up[1:-1, 2:, 2:] - up[1:-1, 2:, :-2] - up[1:-1, :-2, 2:] + up[1:-1, :-2, :-2]
    ) / (4.0 * hy * ht)
    xc = x[:, None, None]
    yc = y[None, :, None]
    out[:] = (
        uxx
        + uyy
        + 4.0 * (xc * xc + yc * yc) * utt
        + 4.0 * yc * uxt
        - mixed_sign * 4.0 * xc * uyt
    )


def _first_x(u, y, hx, ht) -> np.ndarray:
    # X u = D_x u + 2 y D_tau u with centered first differences
    up = _pad3(u)
    return (up[2:, 1:-1, 1:-1] - up[:-2, 1:-1, 1:-1]) / (2.0 * hx) + (
        2.0 * y[None, :, None]
    ) * (up[1:-1, 1:-1, 2:] - up[1:-1, 1:-1, :-2]) / (2.0 * ht)


def _first_y(u, x, hy, ht) -> np.ndarray:
    # Y u = D_y u - 2 x D_tau u
    up = _pad3(u)
    return (up[1:-1, 2:, 1:-1] - up[1:-1, :-2, 1:-1]) / (2.0 * hy) - (
        2.0 * x[:, None, None]
    ) * (up[1:-1, 1:-1, 2:] - up[1:-1, 1:-1, :-2]) / (2.0 * ht)


def box_composed(u, x, y, hx, hy, ht, out) -> None:
    """Composed-form stencil X(Xu) + Y(Yu) on H^1.

    Each horizontal field is discretized as a centered first difference
    and applied twice, which produces a wide stencil (effective spacing
    2h per direction) that is exactly the negative-semidefinite square
    of the skew-symmetric first-difference fields.
    """
    a = _first_x(u, y, hx, ht)
    b = _first_y(u, x, hy, ht)
    out[:] = _first_x(a, y, hx, ht) + _first_y(b, x, hy, ht)


def cyl_centered(u, r, dr, dtau, two_n_minus_1, out) -> None:
    """Cylindrical stencil u_rr + ((2N-1)/r) u_r + 4 r^2 u_tautau.

    Even reflection across the axis: the ghost node at -dr/2 carries the
    value of the first node, which keeps the stencil exact on smooth even
    profiles (r^2 maps to 4N at every node including j = 0).
    """
    up = np.zeros((u.shape[0] + 2, u.shape[1] + 2))
    up[1:-1, 1:-1] = u
    up[0, 1:-1] = u[0]
    c = u
    d2r = (up[2:, 1:-1] - 2.0 * c + up[:-2, 1:-1]) / (dr * dr)
    d1r = (up[2:, 1:-1] - up[:-2, 1:-1]) / (2.0 * dr)
    d2t = (up[1:-1, 2:] - 2.0 * c + up[1:-1, :-2]) / (dtau * dtau)
    rc = r[:, None]
    out[:] = d2r + (two_n_minus_1 / rc) * d1r + 4.0 * (rc * rc) * d2t


def cyl_flux(u, r, dr, dtau, two_n_minus_1, out) -> None:
    """Divergence-form cylindrical stencil

        (1 / (r^(2N-1) dr)) * [ r_+^(2N-1) D_+ u - r_-^(2N-1) D_- u ]
            + 4 r^2 u_tautau,

    with face radii r_+- = r +- dr/2.  Self-adjoint in the weighted inner
    product sum(u v r^(2N-1)); the inner face coefficient vanishes at the
    axis so no reflection ghost is needed.
    """
    up = np.zeros((u.shape[0] + 2, u.shape[1] + 2))
    up[1:-1, 1:-1] = u
    c = u
    rp = r + 0.5 * dr
    rm = r - 0.5 * dr
    wm = r**two_n_minus_1 * (dr * dr)
    ap = (rp**two_n_minus_1 / wm)[:, None]
    am = (rm**two_n_minus_1 / wm)[:, None]
    d2t = (up[1:-1, 2:] - 2.0 * c + up[1:-1, :-2]) / (dtau * dtau)
    rc = r[:, None]
    out[:] = ap * (up[2:, 1:-1] - c) - am * (c - up[:-2, 1:-1]) + 4.0 * (rc * rc) * d2t
