"""Littlewood-Paley square functions and dyadic Triebel-Lizorkin blocks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jacobi import GridFunction, Quadrature, SpectralFunction, phi_table, synthesize
from .semigroups import dt_k_poisson, fractional_dt
from .smooth import BumpFunction, build_bump

__all__ = [
    "TimeGrid",
    "build_time_grid",
    "time_grid_for",
    "g_function",
    "g_fractional",
    "dyadic_window",
    "phi_block",
    "min_j_max",
    "tl_quadratic",
    "block_weights",
]


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Trapezoid rule in ``log t`` for ``int_{t_lo}^{t_hi} F(t) dt/t``."""

    t: np.ndarray
    weights: np.ndarray
    step: float

    @property
    def t_lo(self) -> float:
        return float(self.t[0])

    @property
    def t_hi(self) -> float:
        return float(self.t[-1])


def build_time_grid(t_lo: float, t_hi: float, step: float = 0.05, min_nodes: int = 600) -> TimeGrid:
    if not 0 < t_lo < t_hi:
        raise ValueError("need 0 < t_lo < t_hi")
    span = math.log(t_hi / t_lo)
    n = max(min_nodes, int(math.ceil(span / step)) + 1)
    y = np.linspace(math.log(t_lo), math.log(t_hi), n)
    h = y[1] - y[0]
    w = np.full(n, h)
    w[[0, -1]] *= 0.5
    return TimeGrid(np.exp(y), w, h)


def time_grid_for(f: SpectralFunction, step: float = 0.05, min_nodes: int = 600, lo: float = 1e-6, hi: float = 50.0) -> TimeGrid:
    """Grid on ``[lo / sqrt(lambda_max), hi / sqrt(lambda_min)]`` over the active nonzero modes."""
    lam = f.lam()[(f.coeffs != 0)]
    lam = lam[lam > 0]
    if lam.size == 0:
        lam = np.array([1.0])
    return build_time_grid(lo / math.sqrt(lam.max()), hi / math.sqrt(lam.min()), step, min_nodes)


def _theta(quad):
    return quad.nodes if isinstance(quad, Quadrature) else np.atleast_1d(np.asarray(quad, dtype=float))


def _square_integral(f: SpectralFunction, symbols: np.ndarray, s: float, tg: TimeGrid, quad) -> GridFunction:
    """``(int |sum_n symbols[t, n] c_n phi_n(theta)|^2 dt/t)^{1/2}`` on the grid.

    ``symbols`` already carries the ``t^s`` factor; the part of the integral
    below ``t_lo``, where the integrand behaves like ``t^{2s}``, is added as
    ``|G(t_lo)|^2 / (2s)``.
    """
    theta = _theta(quad)
    n = f.coeffs.size
    table = quad.phi(f.params, n - 1) if isinstance(quad, Quadrature) else phi_table(f.params, n - 1, theta)
    G = symbols @ table  # (T, theta)
    sq = np.abs(G) ** 2
    total = tg.weights @ sq + sq[0] / (2.0 * s)
    vals = np.sqrt(total)
    return GridFunction(quad, vals) if isinstance(quad, Quadrature) else vals


def g_function(f: SpectralFunction, gamma: float, k: int, quad, tg: TimeGrid | None = None) -> GridFunction:
    """``g^{gamma,k}(f)(theta) = (int_0^inf |t^{k-gamma} d_t^k P_t f(theta)|^2 dt/t)^{1/2}``."""
    if not 0 < gamma < k:
        raise ValueError(f"g^{{gamma,k}} needs 0 < gamma < k (got gamma={gamma}, k={k})")
    tg = tg or time_grid_for(f)
    s = k - gamma
    sym = np.array([t**s * dt_k_poisson(f, t, k).padded(f.coeffs.size) for t in tg.t])
    return _square_integral(f, sym, s, tg, quad)


def g_fractional(f: SpectralFunction, gamma: float, quad, tg: TimeGrid | None = None, method: str = "spectral") -> GridFunction:
    """``g^gamma(f)(theta) = (int_0^inf |t^gamma d_t^gamma P_t f(theta)|^2 dt/t)^{1/2}``."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    tg = tg or time_grid_for(f)
    sym = np.array([t**gamma * fractional_dt(f, t, gamma, method).padded(f.coeffs.size) for t in tg.t])
    return _square_integral(f, sym, gamma, tg, quad)


def dyadic_window(f: SpectralFunction, j: int, bump: BumpFunction | None = None) -> SpectralFunction:
    """``c_n -> a(lambda_n / 2^{j-1}) c_n`` for any integer ``j``."""
    bump = bump or build_bump()
    return f.with_coeffs(bump(f.lam() / 2.0 ** (j - 1)) * f.coeffs)


def phi_block(f: SpectralFunction, j: int, bump: BumpFunction | None = None) -> SpectralFunction:
    """``Phi_j f``: the projection ``c_0 phi_0`` for ``j = 0``, the dyadic window otherwise."""
    if j < 0:
        raise ValueError("block index j must be nonnegative")
    if j == 0:
        return f.with_coeffs(f.coeffs[:1])
    return dyadic_window(f, j, bump)


def min_j_max(f: SpectralFunction) -> int:
    """Smallest ``j_max`` with ``2^{j_max - 1} > 2 max(active lambda_n)``."""
    lam = f.lam()[f.coeffs != 0]
    top = float(lam.max()) if lam.size else 0.0
    j = 1
    while 2.0 ** (j - 1) <= 2.0 * top:
        j += 1
    return j


def block_weights(gamma: float, j_max: int) -> np.ndarray:
    return 2.0 ** (gamma * np.arange(j_max + 1))


def tl_quadratic(f: SpectralFunction, gamma: float, j_max: int | None, quad, bump: BumpFunction | None = None) -> GridFunction:
    """``(sum_{j=0}^{j_max} (2^{j gamma} |Phi_j f|)^2)^{1/2}`` on the grid.

    ``j_max`` must clear the active spectrum (every block past it vanishes),
    so the finite sum equals the full series.
    """
    need = min_j_max(f)
    if j_max is None:
        j_max = need
    if j_max < need:
        raise ValueError(f"j_max={j_max} too small: active spectrum needs j_max >= {need}")
    acc = np.zeros(quad.nodes.size)
    for j, wj in enumerate(block_weights(gamma, j_max)):
        blk = phi_block(f, j, bump)
        if not np.any(blk.coeffs):
            continue
        acc += (wj * np.abs(synthesize(blk, quad).values)) ** 2
    return GridFunction(quad, np.sqrt(acc))
