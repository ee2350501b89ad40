"""Heat and Poisson semigroups of the Jacobi operator.

Spectral actions, truncated kernel series, the subordination integral taking
heat kernels to the Poisson kernel, and integer and fractional time
derivatives of the Poisson extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc, gammaincc, roots_jacobi

from .errors import TruncationError
from .jacobi import JacobiParams, Quadrature, SpectralFunction, phi_table

__all__ = [
    "KernelMatrix",
    "GaussianBoundFit",
    "T_MIN",
    "N_CAP",
    "heat_apply",
    "heat_kernel",
    "poisson_apply",
    "poisson_kernel_series",
    "poisson_kernel_subordinated",
    "dt_k_poisson",
    "fractional_dt",
    "dt_symbol",
    "gaussian_bound_fit",
]

T_MIN = 1e-3
N_CAP = 2000
KERNEL_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Kernel values ``K(theta_i, theta_j)`` on a grid.

    ``n_terms`` is the series truncation (for the subordinated kernel, the
    largest truncation among the heat kernels used); ``tail`` the estimated
    truncation error; ``flags`` lists any tolerance breaches.
    """

    params: JacobiParams
    t: float
    values: np.ndarray
    kind: str
    theta: np.ndarray
    n_terms: int
    tail: float = 0.0
    flags: tuple = field(default=())

    def asymmetry(self) -> float:
        return float(np.max(np.abs(self.values - self.values.T)))

    @property
    def ok(self) -> bool:
        return not self.flags


def _theta_of(grid) -> np.ndarray:
    if isinstance(grid, Quadrature):
        return grid.nodes
    return np.atleast_1d(np.asarray(grid, dtype=float))


def heat_apply(f: SpectralFunction, t: float) -> SpectralFunction:
    """``W_t f``: coefficients times ``exp(-t lambda_n)``."""
    if not t > 0:
        raise ValueError("t must be positive")
    return f.with_coeffs(np.exp(-t * f.lam()) * f.coeffs)


def poisson_apply(f: SpectralFunction, t: float) -> SpectralFunction:
    """``P_t f``: coefficients times ``exp(-t sqrt(lambda_n))``."""
    if not t > 0:
        raise ValueError("t must be positive")
    a = f.params.sqrt_lam(np.arange(f.coeffs.size))
    return f.with_coeffs(np.exp(-t * a) * f.coeffs)


# Irrationally offset reference nodes for the per-mode sup bound.  The user
# grid alone can alias: on M midpoints the Chebyshev phi_M vanishes identically.
_REF_THETA = np.pi * (np.arange(400) + 0.5 * (np.sqrt(5.0) - 1.0)) / 400


class _Table:
    """Growable phi table on fixed nodes with per-mode sup norms."""

    def __init__(self, params, theta):
        self.params, self.theta = params, theta
        self.rows = np.empty((0, theta.size))
        self.sup2 = np.empty(0)

    def upto(self, n):
        if n >= self.rows.shape[0]:
            size = min(N_CAP + 1, max(n + 1, 2 * self.rows.shape[0], 64))
            self.rows = phi_table(self.params, size - 1, self.theta)
            ref = phi_table(self.params, size - 1, _REF_THETA)
            self.sup2 = np.maximum(np.max(self.rows**2, axis=1), np.max(ref**2, axis=1))
        return self.rows[: n + 1]


def _truncation(params, decay, table: _Table, what: str) -> int:
    """Smallest N with ``decay(lambda_N) * sup|phi_N|^2 < KERNEL_TOL``.

    ``decay`` is decreasing in the eigenvalue, so the tail beyond N is
    dominated by the first dropped term times a geometric factor.
    """
    n = 0
    while True:
        if n > N_CAP:
            raise TruncationError(f"{what}: series not truncated within {N_CAP} modes")
        table.upto(min(n + 63, N_CAP))
        hi = min(table.rows.shape[0], n + 64)
        idx = np.arange(n, hi)
        terms = decay(params.lam(idx)) * table.sup2[idx]
        small = np.flatnonzero(terms < KERNEL_TOL)
        if small.size:
            return int(idx[small[0]])
        n = hi


def _heat_matrix(params, u, table: _Table):
    """Truncated heat kernel at time ``u`` (no lower bound on ``u``)."""
    n = _truncation(params, lambda lam: np.exp(-u * lam), table, f"heat kernel at t={u:.3g}")
    rows = table.upto(n)
    e = np.exp(-u * params.lam(np.arange(n + 1)))
    return (rows.T * e) @ rows, n


def heat_kernel(params: JacobiParams, t: float, grid) -> KernelMatrix:
    """``W_t(theta, phi) = sum_n exp(-t lambda_n) phi_n(theta) phi_n(phi)`` on a grid.

    The series stops at the first N with ``exp(-t lambda_N) max|phi_N|^2 < 1e-14``.
    Times below ``T_MIN`` would need more than ``N_CAP`` modes and are rejected.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if t < T_MIN:
        raise TruncationError(f"heat kernel needs t >= {T_MIN} (got {t}); series would exceed {N_CAP} modes")
    theta = _theta_of(grid)
    vals, n = _heat_matrix(params, t, _Table(params, theta))
    return KernelMatrix(params, float(t), vals, "heat", theta, n, KERNEL_TOL)


def poisson_kernel_series(params: JacobiParams, t: float, grid) -> KernelMatrix:
    """``P_t(theta, phi) = sum_n exp(-t sqrt(lambda_n)) phi_n(theta) phi_n(phi)``."""
    if not t > 0:
        raise ValueError("t must be positive")
    theta = _theta_of(grid)
    table = _Table(params, theta)
    n = _truncation(params, lambda lam: np.exp(-t * np.sqrt(lam)), table, f"Poisson kernel at t={t:.3g}")
    rows = table.upto(n)
    e = np.exp(-t * params.sqrt_lam(np.arange(n + 1)))
    return KernelMatrix(params, float(t), (rows.T * e) @ rows, "poisson", theta, n, KERNEL_TOL)


def poisson_kernel_subordinated(
    params: JacobiParams,
    t: float,
    grid,
    nodes: int = 400,
    v_range=(1e-6, 1e6),
    tail_tol: float = 1e-10,
) -> KernelMatrix:
    """Poisson kernel from heat kernels by subordination.

    With ``u = t^2/(4v)`` the integral ``t/sqrt(4 pi) int e^{-t^2/4u} u^{-3/2} W_u du``
    becomes ``pi^{-1/2} int e^{-v} v^{-1/2} W_{t^2/4v} dv``, evaluated by the
    trapezoid rule in ``log v`` on ``[v_lo, v_hi] * t^2``.  Nodes whose weight
    is below ``1e-18`` are skipped.  When ``lambda_0 = 0`` the constant mode
    ``phi_0 (x) phi_0`` is given its exact total weight 1, which covers the
    cut-off ``(0, v_lo)`` where ``W_u`` has collapsed onto it.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    theta = _theta_of(grid)
    table = _Table(params, theta)
    v_lo, v_hi = v_range[0] * t * t, v_range[1] * t * t
    y = np.linspace(np.log(v_lo), np.log(v_hi), nodes)
    h = y[1] - y[0]
    v = np.exp(y)
    wts = h * np.exp(-v) * np.sqrt(v) / math.sqrt(math.pi)
    wts[[0, -1]] *= 0.5
    out = np.zeros((theta.size, theta.size))
    n_max = 0
    used = 0.0
    for vi, wi in zip(v, wts):
        if wi < 1e-18:
            continue
        mat, n = _heat_matrix(params, t * t / (4.0 * vi), table)
        out += wi * mat
        used += wi
        n_max = max(n_max, n)
    phi0 = table.upto(0)[0]
    lam0 = params.lam(0)
    left_mass = gammainc(0.5, v_lo)
    if lam0 == 0.0:
        # mode 0 is constant in u, so its weight must total exactly 1; this
        # absorbs both the cut-off (0, v_lo) and the trapezoid end defect
        out += (1.0 - used) * np.outer(phi0, phi0)
        left_tail = 0.0
    else:
        left_tail = left_mass * math.exp(-lam0 * t * t / (4.0 * v_lo)) * table.sup2[0]
    # right tail: W_u at the smallest u is bounded by its trace-like sup
    u_min = t * t / (4.0 * v_hi)
    right_tail = gammaincc(0.5, v_hi) * (1.0 / math.sqrt(u_min) + table.sup2[0])
    tail = float(left_tail + right_tail)
    flags = ("tail",) if tail > tail_tol else ()
    return KernelMatrix(params, float(t), out, "poisson-subordinated", theta, n_max, tail, flags)


def dt_k_poisson(f: SpectralFunction, t: float, k: int) -> SpectralFunction:
    """``d^k/dt^k P_t f``: coefficients times ``(-1)^k lambda^{k/2} exp(-t sqrt(lambda))``."""
    if not t > 0:
        raise ValueError("t must be positive")
    if k < 0:
        raise ValueError("k must be nonnegative")
    a = f.params.sqrt_lam(np.arange(f.coeffs.size))
    return f.with_coeffs((-a) ** k * np.exp(-t * a) * f.coeffs)


# Gauss rules reused by the quadrature path
_GL16 = leggauss(16)
_GJ_CACHE: dict = {}


def _gauss_jacobi(mu: float, n: int = 64):
    key = (round(mu, 15), n)
    if key not in _GJ_CACHE:
        _GJ_CACHE[key] = roots_jacobi(n, 0.0, mu - 1.0)
    return _GJ_CACHE[key]


def _power_laplace(a: float, mu: float) -> float:
    """``int_0^inf e^{-a s} s^{mu-1} ds`` by split quadrature (mu in (0, 1]).

    On ``(0, s0]`` a Gauss-Jacobi rule absorbs ``s^{mu-1}``; beyond ``s0`` a
    composite Gauss-Legendre rule in ``log s`` runs until ``a S - mu log S >= 40``.
    """
    s0 = min(1.0, 20.0 / a)
    x, w = _gauss_jacobi(mu)
    s = 0.5 * s0 * (1.0 + x)
    head = (0.5 * s0) ** mu * np.dot(w, np.exp(-a * s))
    S = max(s0, 1.0 / a)
    while a * S - mu * math.log(S) < 40.0:
        S *= 1.5
    n_pan = max(1, int(math.ceil((math.log(S) - math.log(s0)) / 0.25)))
    edges = np.linspace(math.log(s0), math.log(S), n_pan + 1)
    xg, wg = _GL16
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    yy = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    ww = (half[:, None] * wg[None, :]).ravel()
    ss = np.exp(yy)
    tail = np.dot(ww, np.exp(-a * ss) * ss**mu)
    return float(head + tail)


def dt_symbol(a: float, t: float, gamma: float, method: str = "quadrature") -> complex:
    """``d_t^gamma`` applied to ``exp(-a t)``, divided by nothing: the value at ``t``.

    The spectral rule is ``e^{i pi gamma} a^gamma e^{-a t}``; the quadrature
    path evaluates

        e^{-i(m-gamma) pi} / Gamma(m-gamma) * int_0^inf (d/dt)^m e^{-a(t+s)} s^{m-gamma-1} ds

    with ``m = ceil(gamma)``.  Integer orders are plain derivatives.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if a < 0:
        raise ValueError("a must be nonnegative")
    if a == 0.0:
        return 0j
    if float(gamma).is_integer() or method == "spectral":
        return complex(np.exp(1j * math.pi * gamma) * a**gamma * math.exp(-a * t))
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    m = math.ceil(gamma)
    mu = m - gamma
    phase = np.exp(-1j * mu * math.pi) / gamma_fn(mu)
    return complex(phase * (-a) ** m * math.exp(-a * t) * _power_laplace(a, mu))


def fractional_dt(f: SpectralFunction, t: float, gamma: float, method: str = "spectral") -> SpectralFunction:
    """``d_t^gamma P_t f`` at time ``t`` (complex coefficients).

    ``method="spectral"`` multiplies ``c_n`` by ``e^{i pi gamma} lambda_n^{gamma/2} e^{-t sqrt(lambda_n)}``;
    ``method="quadrature"`` evaluates the Segovia-Wheeden integral mode by
    mode.  Integer ``gamma`` is routed to :func:`dt_k_poisson`.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    a = f.params.sqrt_lam(np.arange(f.coeffs.size))
    if float(gamma).is_integer():
        out = dt_k_poisson(f, t, int(gamma))
        return out.with_coeffs(out.coeffs.astype(complex))
    if method == "spectral":
        sym = np.exp(1j * math.pi * gamma) * a**gamma * np.exp(-t * a)
    elif method == "quadrature":
        sym = np.array([dt_symbol(ai, t, gamma, "quadrature") if c != 0 else 0j for ai, c in zip(a, f.coeffs)])
    else:
        raise ValueError(f"unknown method {method!r}")
    return f.with_coeffs(sym * f.coeffs)


@dataclass(frozen=True)
class GaussianBoundFit:
    """Smallest ``C`` with ``|W_t| <= C exp(-c (theta-phi)^2/t)/sqrt(t)`` on the sweep."""

    C: float
    c: float
    per_t: tuple
    min_value: float

    @property
    def finite(self) -> bool:
        return bool(np.isfinite(self.C))


def gaussian_bound_fit(params: JacobiParams, ts, grid, c: float = 0.125) -> GaussianBoundFit:
    """Record the Gaussian-bound constant of the heat kernel over ``ts``.

    ``min_value`` is the smallest kernel value seen (a positivity diagnostic).
    Entries below ``1e4 * KERNEL_TOL`` are at the truncation floor, where the
    Gaussian factor would only amplify rounding, and are left out of the fit.
    """
    theta = _theta_of(grid)
    d2 = (theta[:, None] - theta[None, :]) ** 2
    per_t = []
    lo = np.inf
    for t in ts:
        K = heat_kernel(params, t, theta).values
        keep = np.abs(K) > 1e4 * KERNEL_TOL
        ratio = np.abs(K[keep]) * math.sqrt(t) * np.exp(c * d2[keep] / t)
        per_t.append((float(t), float(ratio.max()) if ratio.size else 0.0))
        lo = min(lo, float(K.min()))
    return GaussianBoundFit(max(p[1] for p in per_t), c, tuple(per_t), lo)
