import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import optimize

from jacobispec.jacobi import GridFunction, JacobiParams, SpectralFunction, build_quadrature, synthesize
from jacobispec.vexp import (
    ExponentFunction,
    Weight,
    ap_constant,
    conjugate_exponent,
    log_holder_check,
    luxemburg_norm,
    maximal_operator,
    modular,
    parse_exponent,
    weighted_norm,
)

QUAD = build_quadrature(1024)


def random_grid_function(rng, n=8):
    return GridFunction(QUAD, rng.standard_normal(n) @ np.cos(np.outer(np.arange(n), QUAD.nodes)))


# --- exponents --------------------------------------------------------------------


@pytest.mark.parametrize(
    "spec, lo, hi",
    [("const:3", 3, 3), ("two:2,4", 2, 4), ("sin", 2, 3), ("linear", 2.5, 3.5)],
)
def test_exponent_presets_bounds(spec, lo, hi):
    p = parse_exponent(spec)
    assert p.p_minus == pytest.approx(lo, abs=1e-3)
    assert p.p_plus == pytest.approx(hi, abs=1e-3)


@pytest.mark.parametrize("spec", ["const:0.5", "two:2", "nope", "const:x"])
def test_exponent_rejects_bad_specs(spec):
    with pytest.raises(ValueError):
        parse_exponent(spec)


def test_exponent_rejects_p_below_one():
    with pytest.raises(ValueError):
        ExponentFunction(lambda t: 0.5 + 0 * t, name="bad")


def test_conjugate_exponent():
    p = parse_exponent("sin")
    q = conjugate_exponent(p)
    th = np.linspace(0.1, 3.0, 7)
    np.testing.assert_allclose(1 / p(th) + 1 / q(th), 1.0, atol=1e-14)


# --- Luxemburg norm -------------------------------------------------------------------


def test_luxemburg_constant_exponent_reduction():
    rng = np.random.default_rng(0)
    for p0 in (1.25, 1.5, 2.0, 3.0):
        p = ExponentFunction.constant(p0)
        for _ in range(20):
            f = random_grid_function(rng)
            classical = QUAD.integrate(np.abs(f.values) ** p0) ** (1 / p0)
            assert abs(luxemburg_norm(f, p) - classical) <= 1e-8


def test_luxemburg_two_valued_against_brentq():
    # for f = 1 the modular is (pi/2) (lam^-2 + lam^-4); solve modular = 1 directly
    f = GridFunction(QUAD, np.ones(QUAD.nodes.size))
    lam_ref = optimize.brentq(lambda lam: (math.pi / 2) * (lam**-2 + lam**-4) - 1, 0.5, 5, xtol=1e-15)
    assert luxemburg_norm(f, parse_exponent("two:2,4")) == pytest.approx(lam_ref, abs=1e-12)


@pytest.mark.parametrize("spec", ["sin", "linear", "two:2,4", "log"])
def test_modular_at_norm_is_one(spec):
    rng = np.random.default_rng(1)
    p = parse_exponent(spec)
    for _ in range(10):
        f = random_grid_function(rng)
        assert abs(modular(f, p, luxemburg_norm(f, p)) - 1) <= 1e-7


@pytest.mark.parametrize("c", [0.1, 2.0, 100.0])
def test_luxemburg_homogeneity(c):
    rng = np.random.default_rng(2)
    p = parse_exponent("sin")
    for _ in range(5):
        f = random_grid_function(rng)
        assert abs(luxemburg_norm(f * c, p) - c * luxemburg_norm(f, p)) <= 1e-8 * max(1.0, c * luxemburg_norm(f, p))


def test_luxemburg_zero_function():
    assert luxemburg_norm(GridFunction(QUAD, np.zeros(QUAD.nodes.size)), parse_exponent("sin")) == 0.0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_variable_holder_inequality(seed):
    rng = np.random.default_rng(seed)
    p = parse_exponent("sin")
    q = conjugate_exponent(p)
    f, g = random_grid_function(rng), random_grid_function(rng)
    lhs = abs(QUAD.integrate(f.values * g.values))
    assert lhs <= 2 * luxemburg_norm(f, p) * luxemburg_norm(g, q) + 1e-12


def test_variable_holder_inequality_100_pairs():
    rng = np.random.default_rng(42)
    p = parse_exponent("linear")
    q = conjugate_exponent(p)
    for _ in range(100):
        f, g = random_grid_function(rng, 12), random_grid_function(rng, 12)
        assert abs(QUAD.integrate(f.values * g.values)) <= 2 * luxemburg_norm(f, p) * luxemburg_norm(g, q)


def test_triangle_inequality():
    rng = np.random.default_rng(3)
    p = parse_exponent("two:2,4")
    for _ in range(10):
        f, g = random_grid_function(rng), random_grid_function(rng)
        assert luxemburg_norm(f + g, p) <= luxemburg_norm(f, p) + luxemburg_norm(g, p) + 1e-12


# --- log-Hoelder diagnostic -----------------------------------------------------------


def test_log_holder_smooth_exponent_finite():
    rep = log_holder_check(parse_exponent("sin"))
    assert rep.finite and not rep.violation
    assert 0 < rep.constant < 10


def test_log_holder_log_exponent_finite():
    assert log_holder_check(parse_exponent("log")).finite


def test_log_holder_jump_flagged():
    assert log_holder_check(parse_exponent("two:2,4")).violation


def test_log_holder_constant():
    rep = log_holder_check(ExponentFunction.constant(2.0))
    assert rep.finite and rep.constant == 0.0


# --- maximal operator ------------------------------------------------------------------


def test_maximal_of_constant():
    f = GridFunction(QUAD, np.full(QUAD.nodes.size, 3.0))
    np.testing.assert_allclose(maximal_operator(f).values, 3.0, rtol=1e-10)


def test_maximal_dominates_and_l2_bounded():
    rng = np.random.default_rng(4)
    ratios = []
    coeffs = rng.standard_normal(6)
    for order in (512, 1024, 2048):
        quad = build_quadrature(order)
        f = synthesize(SpectralFunction(JacobiParams(0, 0), coeffs), quad)
        Mf = maximal_operator(f)
        assert np.all(Mf.values >= np.abs(f.values) - 1e-14)
        ratios.append(Mf.l2_norm() / f.l2_norm())
    assert all(1 <= r < 5 for r in ratios)
    assert abs(ratios[-1] - ratios[-2]) / ratios[-1] < 0.05


# --- weights -----------------------------------------------------------------------------


def test_ap_constant_weight():
    rep = ap_constant(Weight.constant(), 2.0)
    assert abs(rep.constant - 1) <= 1e-10
    assert not rep.diverges


def test_ap_power_weights_increase_towards_endpoints():
    vals = [ap_constant(Weight.power(a), 2.0).constant for a in (0.0, 0.5, 0.9)]
    assert vals[0] < vals[1] < vals[2]
    vals_neg = [ap_constant(Weight.power(a), 2.0).constant for a in (0.0, -0.5, -0.9)]
    assert vals_neg[0] < vals_neg[1] < vals_neg[2]
    assert all(math.isfinite(v) for v in vals + vals_neg)


def test_ap_power_weight_closed_form():
    # on intervals (0, b) the A_2 product for theta^a is 1 / ((1+a)(1-a)); the
    # sampled intervals start at delta >= 1e-8, which costs O(sqrt(delta / b))
    rep = ap_constant(Weight.power(0.5), 2.0)
    assert rep.constant <= 4 / 3 + 1e-12
    assert rep.constant == pytest.approx(4 / 3, rel=2e-4)


def test_ap_non_integrable_weight_diverges():
    rep = ap_constant(Weight.power(-1.5), 2.0)
    assert rep.diverges


def test_ap_rejects_p_le_one():
    with pytest.raises(ValueError):
        ap_constant(Weight.constant(), 1.0)


def test_weighted_norm_examples():
    phi3 = synthesize(SpectralFunction.mode(JacobiParams(0, 0), 3), QUAD)
    assert weighted_norm(phi3, Weight.constant(), 2.0) == pytest.approx(1.0, abs=1e-12)
    assert weighted_norm(GridFunction(QUAD, np.zeros(QUAD.nodes.size)), Weight.constant(), 2.0) == 0.0
    one = GridFunction(QUAD, np.ones(QUAD.nodes.size))
    assert weighted_norm(one, Weight.power(1.0), 1.0) == pytest.approx(math.pi**2 / 2, rel=1e-13)
