"""Invariant checks run by ``jacobispec selftest``."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn

from .jacobi import (
    GridFunction,
    JacobiParams,
    SpectralFunction,
    apply_ladder,
    build_quadrature,
    coefficients,
    ladder_factor,
    phi_table,
    synthesize,
)
from .littlewood_paley import g_fractional, g_function
from .multipliers import C_gamma_r, apply_multiplier, multiplier_library, neg_power, riesz, riesz_adjoint
from .semigroups import dt_symbol, poisson_kernel_series, poisson_kernel_subordinated
from .spaces import _sign_sum_error, make_suite
from .smooth import build_bump
from .vexp import luxemburg_norm, modular, parse_exponent

__all__ = ["CheckResult", "run_selftest", "CHECKS"]

PRESETS = [(-0.5, -0.5), (0.0, 0.0), (0.5, 0.5), (2.0, 0.5)]


@dataclass(frozen=True)
class CheckResult:
    name: str
    error: float
    tol: float
    seconds: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tol)


def _orthonormality(quick):
    order, n = (1024, 20) if quick else (4096, 40)
    quad = build_quadrature(order)
    err = 0.0
    for ab in PRESETS:
        T = phi_table(JacobiParams(*ab), n, quad.nodes)
        err = max(err, np.max(np.abs((T * quad.weights) @ T.T - np.eye(n + 1))))
    return err, 1e-8


def _chebyshev(quick):
    theta = (np.arange(512) + 0.5) * np.pi / 512
    n = np.arange(30)[:, None]
    c = phi_table(JacobiParams(-0.5, -0.5), 29, theta)
    s = phi_table(JacobiParams(0.5, 0.5), 29, theta)
    ref_c = math.sqrt(2 / math.pi) * np.cos(n * theta)
    ref_c[0] = 1 / math.sqrt(math.pi)
    ref_s = math.sqrt(2 / math.pi) * np.sin((n + 1) * theta)
    return max(np.max(np.abs(c - ref_c)), np.max(np.abs(s - ref_s))), 1e-10


def _ladder(quick):
    quad = build_quadrature(1024 if quick else 2048)
    err = 0.0
    for ab in PRESETS[1:]:
        P = JacobiParams(*ab)
        for ell in range(1, 4):
            for l in range(0, 21):
                d = apply_ladder(SpectralFunction.mode(P, l), ell)
                c = coefficients(synthesize(d, quad), P.raised(ell), 24).padded(25)
                ref = np.zeros(25)
                if l >= ell:
                    ref[l - ell] = ladder_factor(P, l, ell)
                err = max(err, np.max(np.abs(c - ref)))
    return err, 1e-8


def _subordination(quick):
    quad = build_quadrature(64)
    err = 0.0
    ts = (0.5, 2.0) if quick else (0.2, 0.5, 1.0, 2.0)
    for ab in [(0.0, 0.0), (0.5, 0.5)]:
        P = JacobiParams(*ab)
        for t in ts:
            a = poisson_kernel_subordinated(P, t, quad).values
            b = poisson_kernel_series(P, t, quad).values
            err = max(err, np.max(np.abs(a - b)))
    return err, 1e-6


def _fractional(quick):
    err = 0.0
    for a in (0.5, 2.0, 10.0):
        for g in (0.3, 0.5, 1.7):
            for t in (0.1, 0.5, 2.0):
                q = dt_symbol(a, t, g, "quadrature")
                ref = np.exp(1j * math.pi * g) * a**g * math.exp(-a * t)
                err = max(err, abs(q - ref) / abs(ref))
    return err, 1e-6


def _g_isometry(quick):
    P = JacobiParams(0.5, 0.5)
    quad = build_quadrature(1024 if quick else 2048)
    suite = make_suite(P, 16 if quick else 32, n_random=3 if quick else 10, single_max=0)
    err = 0.0
    for gamma in (0.5, 1.0, 1.5):
        const = gamma_fn(2 * gamma) / 2 ** (2 * gamma)
        for _, f in suite:
            r = g_fractional(f, gamma, quad).l2_norm() ** 2 / f.l2_norm() ** 2
            err = max(err, abs(r / const - 1))
    return err, 1e-2


def _key_relation(quick):
    P = JacobiParams(0.0, 0.0)
    quad = build_quadrature(1024 if quick else 2048)
    suite = make_suite(P, 16, n_random=3 if quick else 10, single_max=0)
    err = 0.0
    for gamma, k in ((0.5, 1), (1.0, 2)):
        for _, f in suite:
            a = g_fractional(f, k - gamma, quad).values
            b = g_function(neg_power(f, gamma / 2), gamma, k, quad).values
            err = max(err, np.max(np.abs(a - b)))
    return err, 1e-6


def _gram_inverse(quick):
    err = 0.0
    for ab in [(0.0, 0.0), (0.5, 0.5), (2.0, 0.5)]:
        P = JacobiParams(*ab)
        for k in (1, 2, 3):
            m = multiplier_library("eqT10", P, k=k)
            for _, f in make_suite(P, 20, n_random=10, single_max=0):
                lhs = apply_multiplier(riesz_adjoint(riesz(f, k), k), m)
                rhs = f.with_coeffs(np.where(np.arange(f.coeffs.size) < k, 0, f.coeffs))
                err = max(err, (lhs - rhs).l2_norm() / f.l2_norm())
    return err, 1e-9


def _sign_sum(quick):
    P = JacobiParams(0.0, 0.0)
    bump = build_bump()
    rng = np.random.default_rng(7)
    err = 0.0
    for _, f in make_suite(P, 32, n_random=5, single_max=3):
        for _ in range(10):
            signs = rng.choice([-1.0, 1.0], 13)
            err = max(err, _sign_sum_error(f, 1.0, 12, signs, bump))
    return err, 1e-12


def _luxemburg(quick):
    quad = build_quadrature(1024)
    rng = np.random.default_rng(3)
    err = 0.0
    for spec in ("sin", "linear", "two:2,4"):
        p = parse_exponent(spec)
        for _ in range(5 if quick else 20):
            f = GridFunction(quad, rng.standard_normal(8) @ np.cos(np.outer(np.arange(8), quad.nodes)))
            lam = luxemburg_norm(f, p)
            err = max(err, abs(modular(f, p, lam) - 1))
    return err, 1e-7


def _c_gamma_r(quick):
    return max(
        abs(C_gamma_r(0.5, 1) - 1 / (2 * math.sqrt(math.pi))),
        abs(C_gamma_r(1.0, 2) - 1 / (2 * math.log(2))),
    ), 1e-8


CHECKS = {
    "orthonormality": _orthonormality,
    "chebyshev": _chebyshev,
    "ladder": _ladder,
    "subordination": _subordination,
    "fractional_dt": _fractional,
    "g_isometry": _g_isometry,
    "key_relation": _key_relation,
    "gram_inverse": _gram_inverse,
    "sign_sum": _sign_sum,
    "luxemburg_duality": _luxemburg,
    "C_gamma_r": _c_gamma_r,
}


def run_selftest(quick: bool = False, names=None) -> list[CheckResult]:
    out = []
    for name, fn in CHECKS.items():
        if names and name not in names:
            continue
        t0 = time.perf_counter()
        err, tol = fn(quick)
        out.append(CheckResult(name, float(err), tol, time.perf_counter() - t0))
    return out
