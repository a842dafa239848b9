"""Forcing profile oracles.

Frozen values:

* singular_power with eps=1, lambda=2.5 at gauge 2: 2^(-2.5); capped at
  eps inside the unit gauge ball.
* shifted_power with eps=0.5, lambda=6 at gauge 1: 0.5 * 2^(-6).
* gaussian_bump at the origin: the amplitude.
* Truncated squared-mass of singular_power (eps=1, lambda=2.5, N=1):
  total integral c_Q * Q * (1/Q + 1/(2*lambda - Q)) = 5 c_Q with
  c_Q = pi^2/2; the truncation error at gauge R is 4 c_Q / R.
"""

import math

import numpy as np
import pytest

from heisenheat.forcing import (
    ForcingSpec,
    forcing_integral_truncated,
    forcing_values_box,
    forcing_values_cyl,
    sample_forcing_field,
)
from heisenheat.grids import CylGrid, integrate
from heisenheat.group import GroupDims

C_Q4 = math.pi**2 / 2.0


class TestProfiles:
    def test_singular_power_values(self):
        spec = ForcingSpec.singular_power(1.0, 2.5)
        r = np.array([0.1, 1.0, 2.0])
        tau = np.array([0.0])
        vals = forcing_values_cyl(spec, r[:, None], tau[None, :])
        assert vals[0, 0] == 1.0  # capped inside the unit ball
        assert vals[1, 0] == 1.0
        assert vals[2, 0] == pytest.approx(2.0 ** (-2.5), rel=1e-13)

    def test_shifted_power_value(self):
        spec = ForcingSpec.shifted_power(0.5, 6.0)
        vals = forcing_values_cyl(spec, np.array([[1.0]]), np.array([[0.0]]))
        assert vals[0, 0] == pytest.approx(0.5 * 2.0 ** (-6.0), rel=1e-13)

    def test_gaussian_bump(self):
        spec = ForcingSpec.gaussian_bump(2.0, 3.0)
        v0 = forcing_values_cyl(spec, np.array([[0.0]]), np.array([[0.0]]))
        assert v0[0, 0] == pytest.approx(2.0)
        vb = forcing_values_box(
            spec, np.array([[[1.0]]]), np.array([[[1.0]]]), np.array([[[1.0]]])
        )
        assert vb[0, 0, 0] == pytest.approx(2.0 * math.exp(-3.0 / 9.0), rel=1e-13)

    def test_zero(self):
        spec = ForcingSpec.zero()
        assert np.all(
            forcing_values_cyl(spec, np.ones((3, 1)), np.ones((1, 4))) == 0.0
        )

    def test_box_cyl_consistency(self):
        spec = ForcingSpec.singular_power(0.7, 3.0)
        x, y, t = 0.3, -0.4, 0.2
        r = math.hypot(x, y)
        a = forcing_values_box(
            spec, np.array([[[x]]]), np.array([[[y]]]), np.array([[[t]]])
        )[0, 0, 0]
        b = forcing_values_cyl(spec, np.array([[r]]), np.array([[t]]))[0, 0]
        assert a == pytest.approx(b, rel=1e-13)

    def test_validation(self):
        with pytest.raises(ValueError):
            ForcingSpec.singular_power(-1.0, 2.5)
        with pytest.raises(ValueError):
            ForcingSpec.gaussian_bump(1.0, 0.0)


class TestFieldSampling:
    def test_cell_average_preserves_mass_near_origin(self):
        # Sampling a singular profile at cell centers misses in-cell
        # variation; the measure-weighted subsampling keeps the integral
        # close to the fine-grid truth on a deliberately coarse grid.
        spec = ForcingSpec.singular_power(1.0, 2.5)
        coarse = CylGrid(r_max=8.0, tau_half=16.0, nr=32, ntau=64)
        fine = CylGrid(r_max=8.0, tau_half=16.0, nr=512, ntau=1024)
        f_coarse = sample_forcing_field(spec, coarse)
        f_fine = sample_forcing_field(spec, fine)
        ref = integrate(f_fine)
        assert integrate(f_coarse) == pytest.approx(ref, rel=2e-3)

    def test_smooth_forcing_matches_pointwise(self):
        spec = ForcingSpec.gaussian_bump(1.0, 4.0)
        g = CylGrid(r_max=8.0, tau_half=8.0, nr=64, ntau=64)
        f = sample_forcing_field(spec, g)
        r, tau = g.coords()
        direct = forcing_values_cyl(spec, r, tau)
        # outside the near-origin subsampling region values are untouched,
        # and inside it a smooth profile is only nudged slightly
        dr, dtau = g.spacing
        cut = 6.0 * max(dr, np.sqrt(dtau))
        far = (r**4 + tau * tau) ** 0.25 > cut
        assert np.max(np.abs((f.values - direct)[far])) == 0.0
        assert np.max(np.abs(f.values - direct)) < 5e-3 * np.max(direct)


class TestTruncatedIntegrals:
    def test_squared_mass_singular_power(self):
        spec = ForcingSpec.singular_power(1.0, 2.5)
        dims = GroupDims(1)
        total = 5.0 * C_Q4
        i64 = forcing_integral_truncated(spec, 64.0, dims, power=2)
        assert i64 == pytest.approx(total - 4.0 * C_Q4 / 64.0, rel=1e-3)
        i8 = forcing_integral_truncated(spec, 8.0, dims, power=2)
        assert i8 < i64 < total

    def test_plain_mass_singular_power(self):
        # lambda = 2.5 < Q = 4: the plain mass grows like R^(Q-lambda)
        spec = ForcingSpec.singular_power(1.0, 2.5)
        dims = GroupDims(1)
        exact = C_Q4 * 4.0 * (0.25 + (4.0**1.5 - 1.0) / 1.5)
        val = forcing_integral_truncated(spec, 4.0, dims, power=1)
        assert val == pytest.approx(exact, rel=1e-4)

    def test_gaussian_squared_mass_stabilizes(self):
        a, w = 0.5, 1.5
        spec = ForcingSpec.gaussian_bump(a, w)
        dims = GroupDims(1)
        exact = (
            a**2
            * 2.0
            * math.pi
            * (w**2 / 4.0)
            * (w * math.sqrt(math.pi / 2.0))
        )
        near = forcing_integral_truncated(spec, 6.0 * w, dims, power=2)
        far = forcing_integral_truncated(spec, 60.0 * w, dims, power=2)
        assert near == pytest.approx(exact, rel=1e-4)
        assert far == pytest.approx(exact, rel=1e-4)

    def test_rejects_unknown_power(self):
        spec = ForcingSpec.zero()
        with pytest.raises(ValueError):
            forcing_integral_truncated(spec, 1.0, GroupDims(1), power=3)
