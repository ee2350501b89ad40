import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobispec.errors import TruncationError
from jacobispec.jacobi import JacobiParams, SpectralFunction, build_quadrature, phi_table, synthesize
from jacobispec.semigroups import (
    T_MIN,
    dt_k_poisson,
    dt_symbol,
    fractional_dt,
    gaussian_bound_fit,
    heat_apply,
    heat_kernel,
    poisson_apply,
    poisson_kernel_series,
    poisson_kernel_subordinated,
)

GRID = (np.arange(48) + 0.5) * np.pi / 48


def images_heat(theta, phi, t, sign):
    """Heat kernel on (0, pi) by reflection: sign +1 Neumann (cosines), -1 Dirichlet (sines)."""
    d = theta[:, None] - phi[None, :]
    s = theta[:, None] + phi[None, :]
    m = np.arange(-20, 21)[:, None, None]
    g = lambda x: np.exp(-(x**2) / (4 * t)) / math.sqrt(4 * math.pi * t)
    return np.sum(g(d + 2 * math.pi * m) + sign * g(s + 2 * math.pi * m), axis=0)


def closed_poisson(theta, phi, t, sign):
    ker = lambda x: math.sinh(t) / (math.cosh(t) - np.cos(x)) / (2 * math.pi)
    return ker(theta[:, None] - phi[None, :]) + sign * ker(theta[:, None] + phi[None, :])


# --- spectral semigroups ----------------------------------------------------------


def test_heat_apply_mode(params):
    out = heat_apply(SpectralFunction.mode(params, 4), 0.3)
    assert out.coeffs[4] == pytest.approx(math.exp(-0.3 * params.lam(4)), rel=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=15), st.floats(0.01, 3), st.floats(0.01, 3))
def test_semigroup_laws(c, s, t):
    f = SpectralFunction(JacobiParams(0.5, 0.0), c)
    np.testing.assert_allclose(heat_apply(heat_apply(f, s), t).coeffs, heat_apply(f, s + t).coeffs, rtol=1e-13, atol=1e-300)
    np.testing.assert_allclose(poisson_apply(poisson_apply(f, s), t).coeffs, poisson_apply(f, s + t).coeffs, rtol=1e-13, atol=1e-300)


def test_heat_preserves_constants_when_lambda0_vanishes(quad1024):
    P = JacobiParams(-0.5, -0.5)
    one = SpectralFunction(P, [math.sqrt(math.pi)])
    np.testing.assert_allclose(synthesize(heat_apply(one, 2.0), quad1024).values, 1.0, atol=1e-14)


def test_semigroups_reject_nonpositive_t():
    f = SpectralFunction.mode(JacobiParams(0, 0), 1)
    for fn in (heat_apply, poisson_apply):
        with pytest.raises(ValueError):
            fn(f, 0.0)


# --- kernels -----------------------------------------------------------------------


@pytest.mark.parametrize("t", [0.01, 0.1, 0.5, 2.0])
def test_heat_kernel_chebyshev_images(t):
    K = heat_kernel(JacobiParams(-0.5, -0.5), t, GRID)
    np.testing.assert_allclose(K.values, images_heat(GRID, GRID, t, +1), atol=1e-11)
    K = heat_kernel(JacobiParams(0.5, 0.5), t, GRID)
    np.testing.assert_allclose(K.values, images_heat(GRID, GRID, t, -1), atol=1e-11)


def test_heat_kernel_symmetric_and_positive():
    K = heat_kernel(JacobiParams(0, 0), 0.5, GRID)
    assert K.asymmetry() <= 1e-10
    assert np.all(K.values > 0)
    assert K.kind == "heat" and K.n_terms > 0


def test_heat_kernel_rejects_small_t():
    with pytest.raises(TruncationError):
        heat_kernel(JacobiParams(0, 0), T_MIN / 2, GRID)


def test_heat_kernel_reproduces_semigroup(quad1024):
    P = JacobiParams(0.5, 1.5)
    K = heat_kernel(P, 0.2, quad1024)
    T = quad1024.phi(P, 6)
    for n in range(7):
        out = K.values @ (quad1024.weights * T[n])
        assert np.max(np.abs(out - math.exp(-0.2 * P.lam(n)) * T[n])) <= 1e-8


@pytest.mark.parametrize("t", [0.2, 0.5, 1.0, 2.0])
def test_poisson_series_closed_form(t):
    K = poisson_kernel_series(JacobiParams(-0.5, -0.5), t, GRID)
    np.testing.assert_allclose(K.values, closed_poisson(GRID, GRID, t, +1), atol=1e-12)
    K = poisson_kernel_series(JacobiParams(0.5, 0.5), t, GRID)
    np.testing.assert_allclose(K.values, closed_poisson(GRID, GRID, t, -1), atol=1e-12)
    assert K.asymmetry() <= 1e-10


@pytest.mark.parametrize("ab", [(0.0, 0.0), (0.5, 0.5), (-0.5, -0.5), (2.0, 0.5)])
@pytest.mark.parametrize("t", [0.2, 0.5, 1.0, 2.0])
def test_subordination_matches_series(ab, t):
    P = JacobiParams(*ab)
    a = poisson_kernel_subordinated(P, t, GRID)
    b = poisson_kernel_series(P, t, GRID)
    assert np.max(np.abs(a.values - b.values)) <= 1e-6
    assert a.asymmetry() <= 1e-8
    assert a.ok


def test_subordinated_chebyshev_closed_form():
    K = poisson_kernel_subordinated(JacobiParams(-0.5, -0.5), 0.5, GRID)
    np.testing.assert_allclose(K.values, closed_poisson(GRID, GRID, 0.5, +1), atol=1e-8)


def test_subordination_scalar_identity():
    # t / sqrt(4 pi) int e^{-t^2/4u} u^{-3/2} e^{-u lam} du = e^{-t sqrt(lam)}, via 1-D quad
    from scipy import integrate

    for lam, t in [(0.25, 0.5), (4.0, 1.0), (30.0, 0.2)]:
        val, _ = integrate.quad(
            lambda u: t / math.sqrt(4 * math.pi) * math.exp(-t * t / (4 * u) - u * lam) * u**-1.5, 0, np.inf, epsabs=1e-14
        )
        assert val == pytest.approx(math.exp(-t * math.sqrt(lam)), rel=1e-8)


def test_poisson_large_t_dominant_term():
    P = JacobiParams(1.0, 0.5)
    t = 30.0
    K = poisson_kernel_series(P, t, GRID)
    p0 = phi_table(P, 0, GRID)[0]
    lead = math.exp(-t * P.sqrt_lam(0)) * np.outer(p0, p0)
    assert np.max(np.abs(K.values - lead) / np.max(np.abs(lead))) <= 1e-8


def test_gaussian_bound_fit_finite():
    fit = gaussian_bound_fit(JacobiParams(0.5, 0.0), [0.01, 0.05, 0.2, 1.0], GRID)
    assert math.isfinite(fit.C) and fit.C > 0
    fine = gaussian_bound_fit(JacobiParams(0.5, 0.0), [0.01, 0.05, 0.2, 1.0], (np.arange(96) + 0.5) * np.pi / 96)
    assert fine.C == pytest.approx(fit.C, rel=0.05)


# --- time derivatives -----------------------------------------------------------------


def test_dt_k_poisson_basic(params):
    f = SpectralFunction(params, [0.5, 1.0, -2.0, 0.3])
    np.testing.assert_array_equal(dt_k_poisson(f, 0.4, 0).coeffs, poisson_apply(f, 0.4).coeffs)
    m = SpectralFunction.mode(params, 3)
    assert dt_k_poisson(m, 0.4, 2).coeffs[3] == pytest.approx(params.lam(3) * math.exp(-0.4 * params.sqrt_lam(3)), rel=1e-14)


def test_dt_k_poisson_finite_difference():
    f = SpectralFunction(JacobiParams(0.5, 0.5), [1.0, -0.5, 0.25, 2.0])
    h = 1e-4
    for t in (0.1, 0.5, 2.0):
        fd = (poisson_apply(f, t + h).coeffs - poisson_apply(f, t - h).coeffs) / (2 * h)
        np.testing.assert_allclose(dt_k_poisson(f, t, 1).coeffs, fd, atol=1e-6)


def test_dt_symbol_half_order_example():
    for t in (0.1, 0.5, 2.0):
        ref = 1j * math.sqrt(2) * math.exp(-2 * t)
        assert abs(dt_symbol(2.0, t, 0.5, "spectral") - ref) <= 1e-14
        assert abs(dt_symbol(2.0, t, 0.5, "quadrature") - ref) <= 1e-8


@pytest.mark.parametrize("a", [0.5, 2.0, 10.0])
@pytest.mark.parametrize("gamma", [0.3, 0.5, 1.7])
@pytest.mark.parametrize("t", [0.1, 0.5, 2.0])
def test_dt_symbol_quadrature_rule(a, gamma, t):
    ref = np.exp(1j * math.pi * gamma) * a**gamma * math.exp(-a * t)
    assert abs(dt_symbol(a, t, gamma, "quadrature") - ref) <= 1e-6 * abs(ref)


def test_fractional_integer_order_matches_dt_k():
    f = SpectralFunction(JacobiParams(0.0, 1.0), [0.3, 1.0, -1.0, 0.5])
    for k in (1, 2, 3):
        for method in ("spectral", "quadrature"):
            np.testing.assert_allclose(fractional_dt(f, 0.7, float(k), method).coeffs, dt_k_poisson(f, 0.7, k).coeffs, atol=1e-14)


def test_fractional_paths_agree_on_modes():
    P = JacobiParams(0.5, 0.0)
    f = SpectralFunction(P, np.linspace(1, 0.1, 11))
    for gamma in (0.7, 1.3, 2.5):
        for t in (0.05, 0.5, 2.0):
            a = fractional_dt(f, t, gamma, "spectral").coeffs
            b = fractional_dt(f, t, gamma, "quadrature").coeffs
            assert np.max(np.abs(a - b) / np.abs(a)) <= 1e-6


def test_fractional_phi3_example():
    f = SpectralFunction.mode(JacobiParams(0, 0), 3)
    a = fractional_dt(f, 0.5, 0.7, "spectral").coeffs[3]
    b = fractional_dt(f, 0.5, 0.7, "quadrature").coeffs[3]
    assert abs(a - b) <= 1e-6 * abs(a)


def test_fractional_composition():
    f = SpectralFunction(JacobiParams(0.5, 0.5), [1.0, 2.0, -1.0])
    for method, tol in (("spectral", 1e-14), ("quadrature", 1e-6)):
        lhs = fractional_dt(fractional_dt(f, 0.2, 0.4, method), 0.3, 0.9, method).coeffs
        rhs = fractional_dt(f, 0.5, 1.3, method).coeffs
        assert np.max(np.abs(lhs - rhs) / np.abs(rhs)) <= tol


def test_fractional_zero_mode_vanishes_when_lambda0_zero():
    f = SpectralFunction(JacobiParams(-0.5, -0.5), [1.0, 1.0])
    out = fractional_dt(f, 0.5, 0.5, "quadrature").coeffs
    assert out[0] == 0
    assert abs(out[1] - 1j * math.exp(-0.5)) <= 1e-8


def test_fractional_rejects_bad_input():
    f = SpectralFunction.mode(JacobiParams(0, 0), 1)
    with pytest.raises(ValueError):
        fractional_dt(f, 0.5, -0.5)
    with pytest.raises(ValueError):
        fractional_dt(f, 0.5, 0.5, "magic")
