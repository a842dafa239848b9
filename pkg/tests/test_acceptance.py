"""Acceptance suite: one quantitative target per core claim of the
laboratory, each printed as a scoreboard line in the terminal summary.

Every test pins its tolerances and its runtime budget up front and
reports honestly; a criterion the solver cannot meet at affordable
resolution fails here rather than being loosened.  The twelve lines:

 1. the direct stencil applied to the quartic gauge power reproduces
    the closed-form image 24 (x^2 + y^2) at second order;
 2. the composed stencil is self-adjoint to 1e-10 relative;
 3. translation covariance and dilation homogeneity residuals decay
    at second order and vanish exactly for the trivial shift/scale;
 4. subcritical capacity integrals follow their predicted power laws
    in the time scale, normalized and raw, behind a quadrature gate;
 5. the forcing pairing grows linearly in the time horizon once it
    saturates the forcing mass, and factorizes to 1e-8;
 6. at the critical exponent the capacity bound's first term decays
    near its predicted rate, the log-corrected second term is stable,
    and the total decreases;
 7. subcritical forced runs blow up at every amplitude within one
    horizon while a supercritical run with steep forcing survives;
 8. blow-up times against forcing amplitude: the scaling-law upper
    bound with a uniform constant, and the fitted exponent;
 9. the fixed-point iteration contracts geometrically and lands on
    the marching solver's answer;
10. the weak-form residual converges at first order in dt and second
    order in mesh width;
11. the forcing truncation tail decays at its predicted gauge rate;
12. with diffusion disabled the blow-up bracket contains the ODE's
    closed-form blow-up time.
"""

import math
import time

import numpy as np

from conftest import record

from heisenheat.capacity import (
    SpaceTimeTestFunction,
    critical_capacity,
    fit_exponent,
    forcing_pairing,
    subcritical_verdict,
)
from heisenheat.dynamics import (
    InitialSpec,
    ProblemSpec,
    SolutionHistory,
    SolveConfig,
    StencilTestFunction,
    measure_lifespan,
    picard_iterate,
    solve_until,
    weak_pairing_residual,
)
from heisenheat.forcing import ForcingSpec, forcing_integral_truncated
from heisenheat.grids import BoxGrid3, CylGrid, ScalarField, field_from_function
from heisenheat.group import GroupDims, group_identity, point
from heisenheat.sublaplacian import apply_composed, apply_direct, identity_residuals

DIMS = GroupDims(1)


def _finish(number, name, t0, budget, checks, detail):
    """Record the scoreboard line, then assert it."""
    elapsed = time.perf_counter() - t0
    ok = all(checks) and elapsed <= budget
    line = f"{detail}; {elapsed:.0f}s"
    record(number, name, ok, line)
    assert ok, f"{name}: {line} (budget {budget:.0f}s)"


def _orders(errors):
    return [math.log2(a / b) for a, b in zip(errors, errors[1:])]


# ---------------------------------------------------------------------------
# 1. quartic gauge oracle
# ---------------------------------------------------------------------------


def test_01_quartic_gauge_oracle():
    """|eta|^4 has the closed-form image 24 (x^2 + y^2); the direct
    stencil converges to it at second order under mesh doubling."""
    t0 = time.perf_counter()

    def sup_error(m):
        grid = BoxGrid3((2.0, 2.0, 2.0), (m, m, m))
        u = field_from_function(
            grid, lambda x, y, t: (x * x + y * y) ** 2 + t * t
        )
        lap = apply_direct(u).values
        x, y, _ = grid.coords()
        target = 24.0 * (x * x + y * y) + np.zeros(grid.shape)
        diff = np.abs(lap - target)[1:-1, 1:-1, 1:-1]
        return float(np.max(diff))

    errors = [sup_error(m) for m in (16, 32, 64, 128)]
    orders = _orders(errors)
    _finish(
        1, "quartic-gauge-oracle", t0, 60.0,
        [1.8 <= o <= 2.2 for o in orders],
        "orders " + ", ".join(f"{o:.3f}" for o in orders),
    )


# ---------------------------------------------------------------------------
# 2. composed self-adjointness
# ---------------------------------------------------------------------------


def test_02_composed_self_adjointness():
    """<Lu, v> = <u, Lv> for the composed stencil over 100 random
    interior-supported pairs, to 1e-10 of ||u|| ||v||."""
    t0 = time.perf_counter()
    grid = BoxGrid3((2.0, 2.0, 2.0), (33, 33, 33))
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        u = rng.standard_normal(grid.shape)
        v = rng.standard_normal(grid.shape)
        for w in (u, v):
            w[0, :, :] = w[-1, :, :] = 0.0
            w[:, 0, :] = w[:, -1, :] = 0.0
            w[:, :, 0] = w[:, :, -1] = 0.0
        lu = apply_composed(ScalarField(grid, u)).values
        lv = apply_composed(ScalarField(grid, v)).values
        gap = abs(float(np.sum(lu * v)) - float(np.sum(u * lv)))
        rel = gap / (np.linalg.norm(u) * np.linalg.norm(v))
        worst = max(worst, rel)
    _finish(
        2, "composed-self-adjointness", t0, 60.0,
        [worst <= 1e-10],
        f"worst relative gap {worst:.2e}",
    )


# ---------------------------------------------------------------------------
# 3. group symmetry orders
# ---------------------------------------------------------------------------


def test_03_group_symmetry_orders():
    """Left-translation covariance and dilation homogeneity residuals
    decay at second order; both vanish exactly for the trivial shift
    and unit scale."""
    t0 = time.perf_counter()
    width = 1.5

    def gauss(x, y, t):
        return np.exp(-(x * x + y * y + t * t) / width**2)

    shift = point(0.4, -0.3, 0.25)
    reports = [
        identity_residuals(
            gauss, BoxGrid3((6.0, 6.0, 6.0), (n, n, n)), shift=shift, lam=1.3
        )
        for n in (48, 96, 192)
    ]
    t_orders = _orders([r.translation_residual for r in reports])
    d_orders = _orders([r.dilation_residual for r in reports])
    trivial = identity_residuals(
        gauss, BoxGrid3((6.0, 6.0, 6.0), (48, 48, 48)),
        shift=group_identity(1), lam=1.0,
    )
    _finish(
        3, "group-symmetry-orders", t0, 120.0,
        [all(r.support_ok for r in reports)]
        + [1.8 <= o <= 2.2 for o in t_orders + d_orders]
        + [trivial.translation_residual == 0.0,
           trivial.dilation_residual == 0.0],
        "translation orders "
        + ", ".join(f"{o:.3f}" for o in t_orders)
        + "; dilation orders "
        + ", ".join(f"{o:.3f}" for o in d_orders)
        + f"; trivial ({trivial.translation_residual:.1e},"
        f" {trivial.dilation_residual:.1e})",
    )


# ---------------------------------------------------------------------------
# 4. subcritical capacity slopes
# ---------------------------------------------------------------------------


def test_04_subcritical_capacity_slopes():
    """Normalized capacity integrals scale like T^(Q/2 - p'), raw ones
    one power higher, across three (Q, p) pairs, with the quadrature
    gate (1% change on resolution doubling) passing first."""
    t0 = time.perf_counter()
    t_list = list(np.geomspace(1e2, 1e6, 5))
    cases = [
        (GroupDims(1), 1.5, -1.0, 0.05),
        (GroupDims(1), 1.4, -1.5, 0.08),
        (GroupDims(2), 1.4, -0.5, 0.05),
    ]
    checks = []
    parts = []
    for dims, p, slope_th, tol in cases:
        forcing = ForcingSpec.singular_power(1.0, dims.q + 1.0)
        rep = subcritical_verdict(t_list, p, dims, forcing, resolution=512)
        raw_sigma = fit_exponent(t_list, [r.sigma for r in rep.rows])
        raw_omega = fit_exponent(t_list, [r.omega for r in rep.rows])
        checks += [
            rep.quadrature_ok,
            abs(rep.sigma_fit.slope - slope_th) <= tol,
            abs(raw_sigma.slope - (slope_th + 1.0)) <= tol,
            abs(raw_omega.slope - (slope_th + 1.0)) <= tol,
        ]
        parts.append(
            f"Q={dims.q} p={p}: norm {rep.sigma_fit.slope:.4f}"
            f" raw ({raw_sigma.slope:.4f}, {raw_omega.slope:.4f})"
            f" vs {slope_th:+.1f}/{slope_th + 1.0:+.1f}"
            f" gate={'ok' if rep.quadrature_ok else 'FAILED'}"
        )
    _finish(4, "subcritical-capacity-slopes", t0, 600.0, checks,
            "; ".join(parts))


# ---------------------------------------------------------------------------
# 5. forcing pairing growth
# ---------------------------------------------------------------------------


def test_05_forcing_pairing_growth():
    """Once the horizon dwarfs the forcing support the space-time
    pairing grows linearly in T, and the stepped accumulation matches
    the factorized product to 1e-8."""
    t0 = time.perf_counter()
    forcing = ForcingSpec.singular_power(1.0, 5.0)
    t_list = list(np.geomspace(1e4, 1e8, 5))
    results = [
        forcing_pairing(forcing, t, 1.5, DIMS, resolution=2048)
        for t in t_list
    ]
    fit = fit_exponent(t_list, [r.direct for r in results], theoretical=1.0)
    worst_gap = max(r.rel_gap for r in results)
    _finish(
        5, "forcing-pairing-growth", t0, 120.0,
        [abs(fit.slope - 1.0) <= 0.02, worst_gap <= 1e-8],
        f"slope {fit.slope:.4f}; worst factorization gap {worst_gap:.2e}",
    )


# ---------------------------------------------------------------------------
# 6. critical capacity decay
# ---------------------------------------------------------------------------


def test_06_critical_capacity_decay():
    """At the critical exponent (Q=4, p=2, j=4) the bound's first term
    should decay like R^(Q-2j) = R^-4 (+-0.3), the second term should
    track (ln R)^(-2) within 10%, and the total must fall as R grows."""
    t0 = time.perf_counter()
    r_list = [1e2, 1e3, 1e4]
    rep = critical_capacity(r_list, DIMS, resolution=4096, j_exponent=4.0)
    slope = float(np.polyfit(
        np.log([row.r_cut for row in rep.rows]),
        np.log([row.term1 for row in rep.rows]), 1,
    )[0])
    ratios = rep.term2_over_logpow
    stability = max(ratios) / min(ratios)
    _finish(
        6, "critical-capacity-decay", t0, 600.0,
        [abs(slope + 4.0) <= 0.3, stability <= 1.10, rep.total_decreasing],
        f"term1 slope {slope:.3f} vs -4+-0.3;"
        f" term2/log-power spread {stability:.3f} vs <=1.10;"
        f" total decreasing {rep.total_decreasing}",
    )


# ---------------------------------------------------------------------------
# 7. exponent dichotomy
# ---------------------------------------------------------------------------


def test_07_exponent_dichotomy():
    """Below the critical exponent every forced amplitude blows up
    within one horizon; above it a steep-forcing run with small data
    survives the same horizon with a flat sup-norm."""
    t0 = time.perf_counter()
    horizon = 50.0
    checks = []
    parts = []
    for amp in (1e-3, 1e-2, 1e-1, 1.0):
        grid = CylGrid(120.0, 500.0, 128, 512)
        prob = ProblemSpec(
            dims=DIMS, p=1.5,
            forcing=ForcingSpec.gaussian_bump(amp, 32.0),
            init=InitialSpec.zero(), grid=grid, scheme="imex",
        )
        out = solve_until(prob, SolveConfig(
            t_end=horizon, dt_max=horizon / 64.0, boundary_rel_tol=0.02,
        ))
        checks += [out.status == "blew_up", out.boundary_contact_t is None]
        t_up = f"{out.t_upper:.1f}" if out.t_upper is not None else "-"
        parts.append(f"amp {amp:g}: {out.status} by {t_up}")
    grid = CylGrid(18.0, 374.0, 96, 192)
    prob = ProblemSpec(
        dims=DIMS, p=3.0,
        forcing=ForcingSpec.shifted_power(1e-3, 6.0),
        init=InitialSpec.gaussian(1e-3, 1.0), grid=grid, scheme="imex",
    )
    out = solve_until(prob, SolveConfig(t_end=horizon, boundary_rel_tol=0.02))
    times = np.asarray(out.times)
    sups = np.asarray(out.sups)
    early = float(np.max(sups[times <= 0.1 * horizon]))
    flat = out.sup_final <= 2.0 * early
    checks += [out.status == "survived", out.boundary_contact_t is None, flat]
    parts.append(
        f"steep p=3: {out.status}, final/early {out.sup_final / early:.2f}"
    )
    _finish(7, "exponent-dichotomy", t0, 1800.0, checks, "; ".join(parts))


# ---------------------------------------------------------------------------
# 8. lifespan scaling
# ---------------------------------------------------------------------------


def test_08_lifespan_scaling():
    """Blow-up times for f = eps min(1, g^-5) at p = 1.5 (predicted
    T ~ eps^-2): the sweep's T eps^2 must be uniform within 10x and the
    fitted exponent -2 +- 0.5."""
    t0 = time.perf_counter()
    rep = measure_lifespan(
        [1e-1, 3e-2, 1e-2, 3e-3, 1e-3], decay_exponent=5.0, p=1.5, dims=DIMS,
    )
    all_blew = all(r.status == "blew_up" for r in rep.rows)
    if all_blew and rep.fit is not None:
        const = [r.t_mid * r.epsilon**2 for r in rep.rows]
        spread = max(const) / min(const)
        slope = rep.fit.slope
        detail = (
            f"T*eps^2 spread {spread:.1f} vs <=10;"
            f" slope {slope:.3f} vs {rep.theoretical_slope:.0f}+-0.5;"
            f" r2 {rep.fit.r_squared:.4f}"
        )
        checks = [spread <= 10.0, abs(slope - rep.theoretical_slope) <= 0.5]
    else:
        detail = "rows " + ", ".join(r.status for r in rep.rows)
        checks = [False]
    _finish(8, "lifespan-scaling", t0, 1800.0, checks, detail)


# ---------------------------------------------------------------------------
# 9. picard contraction
# ---------------------------------------------------------------------------


def test_09_picard_contraction():
    """The fixed-point iteration contracts geometrically on a small
    subcritical run and agrees with the marching solver to 1e-3."""
    t0 = time.perf_counter()
    grid = CylGrid(8.0, 20.0, 32, 64)
    prob = ProblemSpec(
        dims=DIMS, p=2.0,
        forcing=ForcingSpec.gaussian_bump(0.05, 1.5),
        init=InitialSpec.gaussian(0.1, 1.5), grid=grid, scheme="imex",
    )
    pic = picard_iterate(prob, t_span=0.4, k_max=10, n_time=64, tol=1e-14)
    late_ratios = pic.ratios[1:]
    march = solve_until(prob, SolveConfig(
        t_end=0.4, dt0=0.4 / 64.0, dt_max=0.4 / 64.0,
    ))
    gap = float(
        np.max(np.abs(pic.final_values - march.final_values))
        / np.max(np.abs(march.final_values))
    )
    _finish(
        9, "picard-contraction", t0, 300.0,
        [pic.converged, not pic.non_contraction]
        + [r < 0.8 for r in late_ratios]
        + [gap <= 1e-3],
        f"max late ratio {max(late_ratios):.3f} vs <0.8;"
        f" march gap {gap:.2e} vs <=1e-3",
    )


# ---------------------------------------------------------------------------
# 10. weak residual orders
# ---------------------------------------------------------------------------


def _manufactured(grid, p):
    """u = A(t) G and the forcing that makes it an exact solution."""
    r, tau = grid.coords()
    w2 = 4.0
    G = np.exp(-(r * r + tau * tau) / w2) + np.zeros(grid.shape)
    lap_G = (
        (-2.0 / w2 + 4.0 * r * r / (w2 * w2))
        + (-2.0 / w2)
        + 4.0 * r * r * (-2.0 / w2 + 4.0 * tau * tau / (w2 * w2))
    ) * G

    def u_at(t):
        return (0.6 + 0.4 * math.cos(t)) * G

    def f_at(t):
        a, da = 0.6 + 0.4 * math.cos(t), -0.4 * math.sin(t)
        return da * G - a * lap_G - np.abs(a * G) ** p

    return u_at, f_at


def _weak_residual(n, n_time, tau_half, test_fn):
    grid = CylGrid(6.0, tau_half, n, 2 * n)
    prob = ProblemSpec(
        dims=DIMS, p=2.0, forcing=ForcingSpec.zero(),
        init=InitialSpec.zero(), grid=grid, scheme="imex",
    )
    u_at, f_at = _manufactured(grid, 2.0)
    times = np.linspace(0.0, 1.5, n_time + 1)
    hist = SolutionHistory(grid, list(times), [u_at(t) for t in times])
    return weak_pairing_residual(prob, hist, test_fn,
                                 forcing_values=f_at).normalized


def test_10_weak_residual_orders():
    """Manufactured-solution weak residual: first order in dt with the
    analytic Laplacian slot, second order in h with the stencil slot."""
    t0 = time.perf_counter()
    analytic = SpaceTimeTestFunction(t_end=1.5, spatial_scale=4.0, dims=DIMS)
    dt_errs = [_weak_residual(192, nt, 10.0, analytic) for nt in (16, 32, 64)]
    dt_orders = _orders(dt_errs)
    stencil = StencilTestFunction(t_end=1.5, sigma=0.8, support_radius=5.0)
    h_errs = [_weak_residual(n, 768, 6.5, stencil) for n in (24, 48, 96)]
    h_orders = _orders(h_errs)
    _finish(
        10, "weak-residual-orders", t0, 600.0,
        [0.8 <= o <= 1.2 for o in dt_orders]
        + [1.8 <= o <= 2.2 for o in h_orders]
        + [h_errs[0] > 1e-4],
        "dt orders " + ", ".join(f"{o:.3f}" for o in dt_orders)
        + "; h orders " + ", ".join(f"{o:.3f}" for o in h_orders),
    )


# ---------------------------------------------------------------------------
# 11. forcing truncation tail
# ---------------------------------------------------------------------------


def test_11_forcing_truncation_tail():
    """Truncating f = min(1, g^-5) at gauge radius R leaves a tail
    decaying like R^(Q-5) = R^-1 toward the analytic total 2.5 pi^2."""
    t0 = time.perf_counter()
    spec = ForcingSpec.singular_power(1.0, 5.0)
    i_total = 2.5 * math.pi**2
    cuts = [1e1, 1e2, 1e3, 1e4]
    tails = [
        i_total - forcing_integral_truncated(spec, r, DIMS, power=1)
        for r in cuts
    ]
    slope = float(np.polyfit(np.log(cuts), np.log(tails), 1)[0])
    final_rel = tails[-1] / i_total
    _finish(
        11, "forcing-truncation-tail", t0, 120.0,
        [abs(slope + 1.0) <= 0.2, final_rel <= 1e-3]
        + [t > 0.0 for t in tails],
        f"tail slope {slope:.4f} vs -1+-0.2;"
        f" residual mass at R=1e4: {final_rel:.1e} of total",
    )


# ---------------------------------------------------------------------------
# 12. ODE blow-up bracket
# ---------------------------------------------------------------------------


def test_12_ode_blowup_bracket():
    """With the operator disabled, constant data a = 2 at p = 2 blows
    up at exactly 1/((p-1) a^(p-1)) = 0.5; the reported bracket must
    contain it within two accepted steps."""
    t0 = time.perf_counter()
    grid = CylGrid(1.0, 1.0, 5, 5)
    prob = ProblemSpec(
        dims=DIMS, p=2.0, forcing=ForcingSpec.zero(),
        init=InitialSpec.constant(2.0), grid=grid, scheme="imex", form="none",
    )
    out = solve_until(prob, SolveConfig(t_end=2.0))
    t_exact = 0.5
    pad = 2.0 * out.dt_max_accepted
    contained = (
        out.status == "blew_up"
        and out.t_lower - pad <= t_exact <= out.t_upper + pad
    )
    _finish(
        12, "ode-blowup-bracket", t0, 60.0,
        [contained],
        f"bracket [{out.t_lower:.4f}, {out.t_upper:.4f}] pad {pad:.4f}"
        f" vs exact {t_exact}",
    )
