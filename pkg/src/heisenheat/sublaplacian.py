"""Discrete sub-Laplacian operators.

The sub-Laplacian on H^1 is L = X^2 + Y^2 with the horizontal fields
X = d/dx + 2y d/dtau and Y = d/dy - 2x d/dtau.  Expanding the squares
gives the direct form

    L u = u_xx + u_yy + 4 (x^2 + y^2) u_tt + 4 y u_xt - 4 x u_yt,

discretized with centered second and cross differences.  The composed form
instead discretizes X and Y as centered first differences and applies each
twice; it is exactly self-adjoint and negative semidefinite because the
first-difference matrices are exactly skew.

For fields that depend only on r = |z| and tau (any N), the operator
reduces to the cylindrical form

    L u = u_rr + ((2N-1)/r) u_r + 4 r^2 u_tautau,

available both as the literal centered stencil (pointwise exact on r^2,
even across the axis) and as a divergence "flux" variant that is exactly
self-adjoint in the r^(2N-1)-weighted inner product, which is what the
implicit time integrator wants.

For gauge-radial functions u = phi(|eta|_H) there is the closed form

    L u = (|z|^2 / rho^2) (phi''(rho) + (Q-1) phi'(rho) / rho),

exposed as radial_profile_value.

These fields are invariant under the right translations eta -> eta o s,
so L commutes with composing a function with a fixed right translation,
and it is homogeneous of degree two under the anisotropic dilations.
identity_residuals measures both statements for the stencil applied to an
analytic function; the residuals vanish identically for the trivial shift
and decay at second order otherwise.  A deliberately wrong sign on the
-4 x u_yt coefficient (the `mixed_sign` hook) breaks translation
covariance at order one, which validation tooling uses as a fault canary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grids import BoxGrid3, CylGrid, ScalarField
from .group import GroupDims, GroupPoint, gauge_norm

__all__ = [
    "apply_direct",
    "apply_composed",
    "apply_cyl",
    "apply_cyl_flux",
    "apply_operator",
    "operator_diagonal",
    "stability_bound",
    "radial_profile_value",
    "IdentityReport",
    "identity_residuals",
]

_impl = _kernels.get_impl()


def _require_box(f: ScalarField) -> BoxGrid3:
    if not isinstance(f.grid, BoxGrid3):
        raise TypeError("this operator form needs a BoxGrid3 field")
    return f.grid


def _require_cyl(f: ScalarField) -> CylGrid:
    if not isinstance(f.grid, CylGrid):
        raise TypeError("this operator form needs a CylGrid field")
    return f.grid


def apply_direct(f: ScalarField, mixed_sign: float = 1.0) -> ScalarField:
    """Direct-form stencil on H^1 (box grids; ghost nodes are zero)."""
    g = _require_box(f)
    hx, hy, ht = g.spacing
    out = np.empty(g.shape)
    _impl.box_direct(
        np.ascontiguousarray(f.values), g.axis(0), g.axis(1), hx, hy, ht,
        float(mixed_sign), out,
    )
    return ScalarField(g, out)


def apply_composed(f: ScalarField) -> ScalarField:
    """Composed-form stencil X(Xu) + Y(Yu) on H^1."""
    g = _require_box(f)
    hx, hy, ht = g.spacing
    out = np.empty(g.shape)
    _impl.box_composed(
        np.ascontiguousarray(f.values), g.axis(0), g.axis(1), hx, hy, ht, out
    )
    return ScalarField(g, out)


def apply_cyl(f: ScalarField) -> ScalarField:
    """Centered cylindrical stencil with even-reflection axis ghost."""
    g = _require_cyl(f)
    dr, dtau = g.spacing
    out = np.empty(g.shape)
    _impl.cyl_centered(
        np.ascontiguousarray(f.values), g.r, dr, dtau, float(2 * g.n - 1), out
    )
    return ScalarField(g, out)


def apply_cyl_flux(f: ScalarField) -> ScalarField:
    """Divergence-form cylindrical stencil, self-adjoint in the weighted
    inner product; preferred by the implicit integrator."""
    g = _require_cyl(f)
    dr, dtau = g.spacing
    out = np.empty(g.shape)
    _impl.cyl_flux(
        np.ascontiguousarray(f.values), g.r, dr, dtau, float(2 * g.n - 1), out
    )
    return ScalarField(g, out)


_FORMS = {
    "direct": apply_direct,
    "composed": apply_composed,
    "cylindrical": apply_cyl,
    "cylindrical_flux": apply_cyl_flux,
}


def apply_operator(f: ScalarField, form: str) -> ScalarField:
    try:
        fn = _FORMS[form]
    except KeyError:
        raise ValueError(f"unknown operator form {form!r}; know {sorted(_FORMS)}")
    return fn(f)


def operator_diagonal(grid, form: str) -> np.ndarray:
    """Diagonal of the stencil matrix as a full grid-shaped array.

    The implicit integrator uses it for Jacobi preconditioning.  The
    direct form's cross differences and the composed form's first
    differences never touch the center node, so only the second
    differences contribute; the centered cylindrical form picks up an
    extra axis-row term from the even-reflection ghost.
    """
    if form in ("direct", "composed"):
        if not isinstance(grid, BoxGrid3):
            raise ValueError(f"{form} form needs a box grid")
        hx, hy, ht = grid.spacing
        x, y, _ = grid.coords()
        z2 = x * x + y * y
        if form == "direct":
            diag = -2.0 / hx**2 - 2.0 / hy**2 - 8.0 * z2 / ht**2
            return np.broadcast_to(diag, grid.shape).copy()
        # composed: diag_i = -|Sx e_i|^2 - |Sy e_i|^2, which shrinks on
        # boundary rows where the skew first differences lose a neighbor
        def count(n):
            c = np.full(n, 2.0)
            c[0] = c[-1] = 1.0
            return c

        nx = count(grid.shape[0])[:, None, None]
        ny = count(grid.shape[1])[None, :, None]
        nt = count(grid.shape[2])[None, None, :]
        diag = (
            -nx / (4.0 * hx**2)
            - ny / (4.0 * hy**2)
            - nt * z2 / ht**2
        )
        return np.broadcast_to(diag, grid.shape).copy()
    if form in ("cylindrical", "cylindrical_flux"):
        if not isinstance(grid, CylGrid):
            raise ValueError(f"{form} form needs a CylGrid")
        dr, dtau = grid.spacing
        r = grid.r
        m = 2 * grid.n - 1
        if form == "cylindrical_flux":
            rp, rm = r + 0.5 * dr, r - 0.5 * dr
            radial = -(rp**m + rm**m) / (r**m * dr * dr)
        else:
            radial = np.full(grid.nr, -2.0 / (dr * dr))
            radial[0] = -1.0 / (dr * dr) - m / (2.0 * r[0] * dr)
        diag = radial[:, None] - 8.0 * (r[:, None] ** 2) / dtau**2
        return np.broadcast_to(diag, grid.shape).copy()
    raise ValueError(f"unknown operator form {form!r}")


def stability_bound(grid, form: str) -> float:
    """Largest explicit-Euler step 2/rho_hat, with rho_hat the Gershgorin
    bound on the spectral radius of the chosen stencil."""
    if form == "direct":
        if not isinstance(grid, BoxGrid3):
            raise ValueError("direct form needs a box grid")
        hx, hy, ht = grid.spacing
        X, Y = np.abs(grid.axis(0)), np.abs(grid.axis(1))
        z2 = (X[:, None] ** 2 + Y[None, :] ** 2).max()
        rho = (
            4.0 / hx**2
            + 4.0 / hy**2
            + 16.0 * z2 / ht**2
            + 4.0 * Y.max() / (hx * ht)
            + 4.0 * X.max() / (hy * ht)
        )
        return 2.0 / rho
    if form == "composed":
        if not isinstance(grid, BoxGrid3):
            raise ValueError("composed form needs a box grid")
        hx, hy, ht = grid.spacing
        xm = float(np.max(np.abs(grid.axis(0))))
        ym = float(np.max(np.abs(grid.axis(1))))
        rho = (1.0 / hx + 2.0 * ym / ht) ** 2 + (1.0 / hy + 2.0 * xm / ht) ** 2
        return 2.0 / rho
    if form in ("cylindrical", "cylindrical_flux"):
        if not isinstance(grid, CylGrid):
            raise ValueError("cylindrical forms need a CylGrid")
        dr, dtau = grid.spacing
        r = grid.r
        m = 2 * grid.n - 1
        if form == "cylindrical":
            rho = 4.0 / dr**2 + m / (r * dr) + 16.0 * r**2 / dtau**2
        else:
            rp, rm = r + 0.5 * dr, r - 0.5 * dr
            ap = rp**m / (r**m * dr * dr)
            am = rm**m / (r**m * dr * dr)
            rho = 2.0 * (ap + am) + 16.0 * r**2 / dtau**2
        return 2.0 / float(np.max(rho))
    raise ValueError(f"unknown operator form {form!r}")


def radial_profile_value(dphi, d2phi, eta: GroupPoint, dims: GroupDims) -> float:
    """Evaluate L u at a point for a gauge-radial u = phi(|eta|_H).

    Only the first two derivatives of the profile are needed:
    (|z|^2/rho^2) (phi'' + (Q-1) phi'/rho).  The value is 0 on the center
    axis z = 0 (away from the identity, where the gauge is not smooth).
    """
    rho = gauge_norm(eta)
    if rho == 0.0:
        raise ValueError("gauge-radial evaluation is singular at the identity")
    z2 = float(np.dot(eta.x, eta.x) + np.dot(eta.y, eta.y))
    if z2 == 0.0:
        return 0.0
    q = dims.q
    return (z2 / rho**2) * (d2phi(rho) + (q - 1.0) * dphi(rho) / rho)


# ---------------------------------------------------------------------------
# covariance checks via analytic stencil evaluation
# ---------------------------------------------------------------------------


def _direct_stencil_at(fn, cx, cy, ct, hx, hy, ht, mixed_sign):
    """Direct-form stencil combination at arbitrary points, sampling the
    analytic function fn(x, y, tau) instead of grid values."""
    c = fn(cx, cy, ct)
    uxx = (fn(cx + hx, cy, ct) - 2.0 * c + fn(cx - hx, cy, ct)) / (hx * hx)
    uyy = (fn(cx, cy + hy, ct) - 2.0 * c + fn(cx, cy - hy, ct)) / (hy * hy)
    utt = (fn(cx, cy, ct + ht) - 2.0 * c + fn(cx, cy, ct - ht)) / (ht * ht)
    uxt = (
        fn(cx + hx, cy, ct + ht)
        - fn(cx + hx, cy, ct - ht)
        - fn(cx - hx, cy, ct + ht)
        + fn(cx - hx, cy, ct - ht)
    ) / (4.0 * hx * ht)
    uyt = (
        fn(cx, cy + hy, ct + ht)
        - fn(cx, cy + hy, ct - ht)
        - fn(cx, cy - hy, ct + ht)
        + fn(cx, cy - hy, ct - ht)
    ) / (4.0 * hy * ht)
    return (
        uxx
        + uyy
        + 4.0 * (cx * cx + cy * cy) * utt
        + 4.0 * cy * uxt
        - mixed_sign * 4.0 * cx * uyt
    )


@dataclass(frozen=True)
class IdentityReport:
    translation_residual: float  # relative, against the translated-stencil scale
    dilation_residual: float
    support_ok: bool
    scale: float


def identity_residuals(
    fn,
    grid: BoxGrid3,
    shift: GroupPoint,
    lam: float,
    mixed_sign: float = 1.0,
) -> IdentityReport:
    """Measure discrete translation covariance and dilation homogeneity.

    Both sides are evaluated analytically (the stencil applied to exact
    samples of fn), so no interpolation enters:

    * translation: stencil of eta -> fn(eta o s) at the nodes, against the
      stencil of fn evaluated at the translated points eta o s;
    * dilation: stencil of fn(delta_lam eta) at the nodes, against
      lam^2 times the stencil of fn at delta_lam eta.

    Residuals are sup norms relative to the translated-stencil scale.  The
    support flag reports whether fn is negligible on the outermost node
    shell; when it is not, the covariance statement is still measured but
    a failure may just mean the function does not fit in the box.
    """
    if not isinstance(grid, BoxGrid3):
        raise TypeError("identity_residuals needs a BoxGrid3")
    if shift.n != 1:
        raise ValueError("covariance checks run on H^1 (N = 1) only")
    if not lam > 0.0:
        raise ValueError("dilation parameter must be positive")
    hx, hy, ht = grid.spacing
    x, y, t = grid.coords()
    sx, sy, st = float(shift.x[0]), float(shift.y[0]), shift.tau

    def shifted(ax, ay, at):
        # fn evaluated at (ax, ay, at) o s
        return fn(ax + sx, ay + sy, at + st + 2.0 * (ax * sy - sx * ay))

    def dilated(ax, ay, at):
        return fn(lam * ax, lam * ay, lam * lam * at)

    # translation: L_h[fn o R_s](eta)  vs  (L_h fn)(eta o s)
    a_tr = _direct_stencil_at(shifted, x, y, t, hx, hy, ht, mixed_sign)
    gx, gy, gt = x + sx, y + sy, t + st + 2.0 * (x * sy - sx * y)
    b_tr = _direct_stencil_at(fn, gx, gy, gt, hx, hy, ht, mixed_sign)
    scale = float(np.max(np.abs(b_tr))) + 1e-300
    res_tr = float(np.max(np.abs(a_tr - b_tr))) / scale

    # dilation: L_h[fn o delta_lam](eta)  vs  lam^2 (L_h fn)(delta_lam eta)
    a_di = _direct_stencil_at(dilated, x, y, t, hx, hy, ht, mixed_sign)
    b_di = lam * lam * _direct_stencil_at(
        fn, lam * x, lam * y, lam * lam * t, hx, hy, ht, mixed_sign
    )
    scale_di = float(np.max(np.abs(b_di))) + 1e-300
    res_di = float(np.max(np.abs(a_di - b_di))) / scale_di

    fvals = np.abs(fn(x, y, t) + np.zeros(grid.shape))
    fmax = float(np.max(fvals)) + 1e-300
    shell = np.zeros(grid.shape, dtype=bool)
    for ax in range(3):
        sl = [slice(None)] * 3
        sl[ax] = slice(0, 1)
        shell[tuple(sl)] = True
        sl[ax] = slice(grid.shape[ax] - 1, None)
        shell[tuple(sl)] = True
    support_ok = bool(np.max(fvals[shell]) <= 1e-6 * fmax)

    return IdentityReport(
        translation_residual=res_tr,
        dilation_residual=res_di,
        support_ok=support_ok,
        scale=scale,
    )
