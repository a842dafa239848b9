"""Backend parity: the compiled kernels must reproduce the NumPy reference
to near machine precision on random fields."""

import numpy as np
import pytest

from heisenheat import _kernels

try:
    compiled = _kernels.get_impl("compiled")
    HAVE_COMPILED = True
except ImportError:
    compiled = None
    HAVE_COMPILED = False

ref = _kernels.get_impl("numpy")

needs_compiled = pytest.mark.skipif(
    not HAVE_COMPILED, reason="compiled kernel extension not built"
)


def rand_box(rng, shape=(12, 11, 13)):
    u = rng.standard_normal(shape)
    x = np.linspace(-1.0, 1.0, shape[0])
    y = np.linspace(-1.2, 1.2, shape[1])
    return u, x, y


def assert_match(a, b):
    scale = np.max(np.abs(a)) + 1.0
    assert np.max(np.abs(a - b)) <= 1e-14 * scale


@needs_compiled
def test_box_direct_parity():
    rng = np.random.default_rng(101)
    u, x, y = rand_box(rng)
    for ms in (1.0, -1.0):
        o1 = np.empty_like(u)
        o2 = np.empty_like(u)
        ref.box_direct(u, x, y, 0.1, 0.12, 0.07, ms, o1)
        compiled.box_direct(u, x, y, 0.1, 0.12, 0.07, ms, o2)
        assert_match(o1, o2)


@needs_compiled
def test_box_composed_parity():
    rng = np.random.default_rng(103)
    u, x, y = rand_box(rng)
    o1 = np.empty_like(u)
    o2 = np.empty_like(u)
    ref.box_composed(u, x, y, 0.1, 0.12, 0.07, o1)
    compiled.box_composed(u, x, y, 0.1, 0.12, 0.07, o2)
    assert_match(o1, o2)


@needs_compiled
@pytest.mark.parametrize("m", [1.0, 3.0])
def test_cyl_parity(m):
    rng = np.random.default_rng(107)
    u = rng.standard_normal((20, 17))
    dr, dtau = 0.05, 0.08
    r = (np.arange(20) + 0.5) * dr
    for fn in ("cyl_centered", "cyl_flux"):
        o1 = np.empty_like(u)
        o2 = np.empty_like(u)
        getattr(ref, fn)(u, r, dr, dtau, m, o1)
        getattr(compiled, fn)(u, r, dr, dtau, m, o2)
        assert_match(o1, o2)


def test_backend_selector():
    assert _kernels.backend_name() in ("compiled", "numpy")
    assert _kernels.get_impl("numpy") is ref
    with pytest.raises(ValueError):
        _kernels.get_impl("fortran")
