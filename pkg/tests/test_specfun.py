"""Complex error function and the Fresnel-type integral."""

import math

import numpy as np
import pytest

from edgewave import specfun

mp = pytest.importorskip("mpmath")


def test_erf_real_axis_matches_scipy():
    from scipy.special import erf as erf_real
    xs = np.linspace(-5.5, 5.5, 113)
    got = specfun.erf_cx(xs + 0j)
    assert np.abs(got - erf_real(xs)).max() < 1e-14
    assert np.abs(got.imag).max() == 0.0


def test_erf_against_mpmath():
    rng = np.random.default_rng(7)
    mp.mp.dps = 30
    for _ in range(25):
        z = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
        want = complex(mp.erf(mp.mpc(z.real, z.imag)))
        got = specfun.erf_cx(z)
        assert abs(got - want) <= 1e-13 * max(1.0, abs(want))


def test_erf_symmetries_structural():
    # oddness and conjugation are enforced by quadrant folding, so they
    # hold exactly, not just to rounding
    rng = np.random.default_rng(11)
    for _ in range(50):
        z = complex(rng.uniform(-6, 6), rng.uniform(-6, 6))
        assert specfun.erf_cx(-z) == -specfun.erf_cx(z)
        assert specfun.erf_cx(np.conj(z)) == np.conj(specfun.erf_cx(z))


def test_erf_saturation_and_overflow():
    assert specfun.erf_cx(27.0 + 0.1j) == 1.0
    assert specfun.erf_cx(-27.0 + 0.1j) == -1.0
    with pytest.raises(OverflowError):
        specfun.erf_cx(0.2 + 40j)
    with pytest.raises(ValueError):
        specfun.erf_cx(2e6 + 0j)
    with pytest.raises(ValueError):
        specfun.erf_cx(complex(np.nan, 0.0))


def test_fresnel_reference_value():
    # F(0) = sqrt(pi)/(2 s): with k = 1/2 this is the classic
    # 0.626657068657750... * (1 + i)
    v = specfun.fresnel_F(0.5, 0.0).value
    ref = 0.6266570686577501
    assert abs(v.real - ref) < 1e-15
    assert abs(v.imag - ref) < 1e-15


def test_fresnel_frozen_values():
    cases = [
        (2.0, 1.0 + 0.5j, 6.2780876936601437e-01 + 6.2817512432605604e-01j),
        (0.7, -2.25, -1.0554510223590020e-01 + 1.1624376438205015e-01j),
    ]
    for k, xi, want in cases:
        got = specfun.fresnel_F(k, xi).value
        assert abs(got - want) < 1e-14


def test_fresnel_derivative_is_integrand():
    # dF/dxi = exp(2 i k xi^2), checked by central differences
    k = 1.3
    for xi in (0.4, -1.2, 0.8 + 0.3j):
        h = 1e-6
        fp = specfun.fresnel_F(k, xi + h).value
        fm = specfun.fresnel_F(k, xi - h).value
        want = np.exp(2j * k * xi ** 2)
        assert abs((fp - fm) / (2 * h) - want) < 1e-8


def test_fresnel_matches_quadrature():
    rng = np.random.default_rng(3)
    for _ in range(20):
        k = rng.uniform(0.2, 3.0)
        if rng.uniform() < 0.5:
            xi = complex(rng.uniform(-4, 4), 0.0)
        else:
            xi = complex(rng.uniform(-2.5, 2.5), rng.uniform(-0.8, 0.8))
        a = specfun.fresnel_F(k, xi).value
        q = specfun.fresnel_F_quadrature(k, xi, tol=1e-12)
        assert abs(a - q.value) <= 1e-10 * max(1.0, abs(q.value))
        assert q.est_abs_error >= 0.0


def test_fresnel_array_matches_scalar():
    k = 0.5 + 0.25j   # trapped-regime wavenumber is allowed
    xis = np.array([0.3, -1.7, 0.2 + 0.4j, -0.6 - 0.2j])
    arr = specfun.fresnel_F_array(k, xis)
    for i, xi in enumerate(xis):
        assert abs(arr[i] - specfun.fresnel_F(k, xi).value) < 1e-15


def test_rotation_root_branch():
    s = specfun._rotation_root(2.0)
    assert s.real > 0
    assert abs(s * s - (-4j)) < 1e-14
    with pytest.raises(ValueError):
        specfun._rotation_root(0.0)


def test_quadrature_tol_validation():
    with pytest.raises(ValueError):
        specfun.fresnel_F_quadrature(1.0, 0.5, tol=1e-15)
    with pytest.raises(ValueError):
        specfun.fresnel_F_quadrature(1.0, 0.5, tol=1e-3)
