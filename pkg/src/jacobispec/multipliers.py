"""Spectral multipliers of the Jacobi operator.

``m(L_a) f = sum_n m(lambda_n - a) c_n phi_n`` for a shift ``a`` below the
bottom of the spectrum, fractional powers, the truncated integrals
``I_eps`` defining positive powers, Riesz transforms and their adjoints,
and a library of concrete multipliers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ShiftError
from .jacobi import JacobiParams, SpectralFunction, apply_ladder, ladder_factor
from .smooth import build_bump, ramp

__all__ = [
    "MultiplierSpec",
    "apply_multiplier",
    "neg_power",
    "pos_power",
    "power_laplace_tail",
    "C_gamma_r",
    "h_integral",
    "I_eps",
    "richardson_weights",
    "pos_power_extrapolated",
    "riesz",
    "riesz_adjoint",
    "riesz_gram_factor",
    "gram_cutoff",
    "multiplier_library",
    "LIBRARY_NAMES",
    "mihlin_check",
]


@dataclass(frozen=True, eq=False)
class MultiplierSpec:
    """Scalar function ``m`` on the spectrum with an optional shift ``a``."""

    func: Callable[[np.ndarray], np.ndarray]
    shift: float = 0.0
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    def __mul__(self, other: "MultiplierSpec") -> "MultiplierSpec":
        if not isinstance(other, MultiplierSpec):
            return NotImplemented
        if other.shift != self.shift:
            raise ValueError("cannot multiply multipliers with different shifts")
        return MultiplierSpec(lambda x: self(x) * other(x), self.shift, f"{self.name}*{other.name}")

    def __add__(self, other: "MultiplierSpec") -> "MultiplierSpec":
        if not isinstance(other, MultiplierSpec):
            return NotImplemented
        if other.shift != self.shift:
            raise ValueError("cannot add multipliers with different shifts")
        return MultiplierSpec(lambda x: self(x) + other(x), self.shift, f"{self.name}+{other.name}")

    def on_spectrum(self, params: JacobiParams, n_max: int) -> np.ndarray:
        """Values ``m(lambda_n - a)`` for ``n = 0..n_max``."""
        _check_shift(params, self.shift)
        return self(params.lam(np.arange(n_max + 1)) - self.shift)


def _check_shift(params: JacobiParams, a: float):
    # a = 0 is the unshifted operator and always allowed
    if a != 0.0 and a >= params.lam(0):
        raise ShiftError(
            f"shift a={a} must lie below lambda_0 = ((alpha+beta+1)/2)^2 = {params.lam(0)}"
        )


def apply_multiplier(f: SpectralFunction, m: MultiplierSpec) -> SpectralFunction:
    """``c_n -> m(lambda_n - a) c_n``."""
    return f.with_coeffs(m.on_spectrum(f.params, f.coeffs.size - 1) * f.coeffs)


def _require_invertible(params: JacobiParams):
    if not params.fractional_ok:
        raise ValueError("negative powers need alpha + beta != -1 (lambda_0 = 0 otherwise)")


def neg_power(f: SpectralFunction, gamma: float) -> SpectralFunction:
    """``L^{-gamma} f``: ``c_n -> lambda_n^{-gamma} c_n``."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    _require_invertible(f.params)
    return f.with_coeffs(f.lam() ** -gamma * f.coeffs)


def pos_power(f: SpectralFunction, gamma: float) -> SpectralFunction:
    """``L^gamma f``: ``c_n -> lambda_n^gamma c_n`` (spectral shortcut)."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return f.with_coeffs(f.lam() ** gamma * f.coeffs)


# --- the integrals int_x^inf (1 - e^{-u})^r u^{-gamma-1} du -------------------

_U0, _U1 = 1e-6, 60.0
_PANEL = 0.25
_XG, _WG = leggauss(20)


def _integrand_log(y, gamma, r):
    # in y = log u the measure u^{-gamma-1} du becomes u^{-gamma} dy
    u = np.exp(y)
    return (-np.expm1(-u)) ** r * np.exp(-gamma * y)


def _left_series(lo, hi, gamma, r):
    """``int_lo^hi`` via ``(1-e^{-u})^r = u^r (1 - r u/2 + r(3r+1) u^2/24 - ...)``."""
    out = 0.0
    for j, c in enumerate((1.0, -r / 2.0, r * (3.0 * r + 1.0) / 24.0)):
        e = r - gamma + j
        out = out + c * (hi**e - lo**e) / e
    return out


class _TailTable:
    """Cumulative panel integrals from each panel edge to ``_U1``."""

    _cache: dict = {}

    def __new__(cls, gamma, r):
        key = (float(gamma), int(r))
        if key not in cls._cache:
            obj = super().__new__(cls)
            n_pan = int(math.ceil((math.log(_U1) - math.log(_U0)) / _PANEL))
            obj.edges = np.linspace(math.log(_U0), math.log(_U1), n_pan + 1)
            half = 0.5 * np.diff(obj.edges)
            mid = 0.5 * (obj.edges[1:] + obj.edges[:-1])
            y = mid[:, None] + half[:, None] * _XG[None, :]
            panel = half * (_integrand_log(y, gamma, r) @ _WG)
            obj.cum = np.concatenate([np.cumsum(panel[::-1])[::-1], [0.0]])
            obj.right = _U1**-gamma / gamma
            cls._cache[key] = obj
        return cls._cache[key]


def power_laplace_tail(x, gamma: float, r: int):
    """``int_x^inf (1 - e^{-u})^r u^{-gamma-1} du`` for ``x >= 0``.

    Composite Gauss-Legendre in ``log u`` on ``[1e-6, 60]``; below ``1e-6`` a
    three-term series, above 60 the tail ``u^{-gamma}/gamma`` (the dropped
    ``e^{-u}`` part is below 1e-25).
    """
    if not 0 < gamma < r:
        raise ValueError(f"need 0 < gamma < r (got gamma={gamma}, r={r}); the integral diverges otherwise")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    tab = _TailTable(gamma, r)
    flat = x.ravel()
    out = np.empty_like(flat)
    big = flat >= _U1
    out[big] = flat[big] ** -gamma / gamma
    small = flat <= _U0
    out[small] = _left_series(flat[small], _U0, gamma, r) + tab.cum[0] + tab.right
    mid = ~(big | small)
    if np.any(mid):
        y = np.log(flat[mid])
        k = np.clip(np.searchsorted(tab.edges, y, side="right") - 1, 0, tab.edges.size - 2)
        top = tab.edges[k + 1]
        half = 0.5 * (top - y)
        nodes = (0.5 * (top + y))[:, None] + half[:, None] * _XG[None, :]
        partial = half * (_integrand_log(nodes, gamma, r) @ _WG)
        out[mid] = partial + tab.cum[k + 1] + tab.right
    return out.reshape(x.shape) if x.ndim else float(out[0])


def C_gamma_r(gamma: float, r: int) -> float:
    """``C_{gamma,r} = (int_0^inf (1-e^{-u})^r u^{-gamma-1} du)^{-1}``."""
    return 1.0 / power_laplace_tail(0.0, gamma, r)


def h_integral(x, gamma: float, r: int, eps: float = 1.0):
    """``H_eps(x) = int_{eps x}^inf (1 - e^{-u})^r u^{-1-gamma} du``."""
    return power_laplace_tail(eps * np.asarray(x, dtype=float), gamma, r)


def I_eps(f: SpectralFunction, gamma: float, r: int, eps: float) -> SpectralFunction:
    """``I_eps^{gamma,r} f``: ``c_n -> C_{gamma,r} H_eps(lambda_n) lambda_n^gamma c_n``.

    (The substitution ``u -> u lambda_n`` in the defining integral.)
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    lam = f.lam()
    sym = C_gamma_r(gamma, r) * h_integral(lam, gamma, r, eps) * lam**gamma
    return f.with_coeffs(sym * f.coeffs)


def richardson_weights(eps, gamma: float, r: int) -> np.ndarray:
    """Weights ``w`` with ``sum w = 1`` cancelling the leading error terms.

    ``C H_eps(lambda) lambda^gamma - lambda^gamma`` expands in powers
    ``eps^{(r - gamma) + j}``, j = 0, 1, ...; with ``len(eps)`` samples the
    first ``len(eps) - 1`` of them are eliminated.
    """
    eps = np.asarray(eps, dtype=float)
    k = eps.size
    A = np.ones((k, k))
    for j in range(1, k):
        A[j] = eps ** ((r - gamma) + (j - 1))
    rhs = np.zeros(k)
    rhs[0] = 1.0
    return np.linalg.solve(A, rhs)


def pos_power_extrapolated(f: SpectralFunction, gamma: float, r: int, eps=(1e-4, 1e-5, 1e-6)) -> SpectralFunction:
    """``L^gamma f`` as the Richardson limit of ``I_eps f`` as ``eps -> 0``."""
    w = richardson_weights(eps, gamma, r)
    coeffs = sum(wi * I_eps(f, gamma, r, e).padded(f.coeffs.size) for wi, e in zip(w, eps))
    return f.with_coeffs(coeffs)


# --- Riesz transforms --------------------------------------------------------


def riesz(f: SpectralFunction, k: int = 1) -> SpectralFunction:
    """``R^k f = DD^k L^{-k/2} f`` in the ``(alpha+k, beta+k)`` system."""
    if k < 1:
        raise ValueError("Riesz order k must be >= 1")
    return apply_ladder(neg_power(f, k / 2.0), k)


def riesz_adjoint(g: SpectralFunction, k: int = 1) -> SpectralFunction:
    """``R^{k,*} g`` for ``g`` in the ``(alpha+k, beta+k)`` system; raises modes by ``k``."""
    if k < 1:
        raise ValueError("Riesz order k must be >= 1")
    base = g.params.lowered(k)
    _require_invertible(base)
    m = np.arange(g.coeffs.size)
    fac = ladder_factor(base, m + k, k) / base.lam(m + k) ** (k / 2.0)
    out = np.zeros(g.coeffs.size + k, dtype=np.result_type(g.coeffs, float))
    out[k:] = fac * g.coeffs
    return SpectralFunction(base, out)


def riesz_gram_factor(params: JacobiParams, n, k: int):
    """``(n-k+1)_k (n+alpha+beta+1)_k / lambda_n^k``: the symbol of ``R^{k,*} R^k``."""
    n = np.asarray(n, dtype=float)
    lam = params.lam(n)
    lam_j = params.lam(np.arange(k))
    return np.prod(lam[..., None] - lam_j, axis=-1) / lam**k


# --- multiplier library ------------------------------------------------------


def gram_cutoff(params: JacobiParams, k: int):
    """Smooth step vanishing below ``lambda_{k-1} + (alpha+beta+1)/8`` and equal to 1 above ``lambda_k - (alpha+beta+1)/8``."""
    d = (params.alpha + params.beta + 1.0) / 8.0
    lo, hi = params.lam(k - 1) + d, params.lam(k) - d
    return lambda x: ramp(x, lo, hi)


def _inverse_gram(params, k):
    """``phi(x) x^k / prod_{j<k} (x - lambda_j)``; inverts ``R^{k,*} R^k`` above mode ``k-1``."""
    _require_invertible(params)
    cut = gram_cutoff(params, k)
    lam_j = params.lam(np.arange(k))

    def m(x):
        x = np.asarray(x, dtype=float)
        c = cut(x)
        on = c > 0
        out = np.zeros_like(x)
        xs = x[on]
        out[on] = c[on] * xs**k / np.prod(xs[..., None] - lam_j, axis=-1)
        return out

    return m


def _lemma_step(params):
    """Smooth step vanishing below ``lambda_0/2`` and equal to 1 from ``lambda_0`` on."""
    _require_invertible(params)
    l0 = params.lam(0)
    return lambda x: ramp(x, l0 / 2.0, l0)


def _dyadic_sum(weights, gamma, bump, window):
    """``sum_j w_j 2^{j gamma} (t+1)^{-gamma} window(t/2^{j-1})``."""
    weights = np.asarray(weights, dtype=float)

    def m(t):
        t = np.asarray(t, dtype=float)
        acc = np.zeros_like(t)
        for j, wj in enumerate(weights):
            if wj:
                acc += wj * 2.0 ** (j * gamma) * window(t / 2.0 ** (j - 1))
        return acc / (t + 1.0) ** gamma if gamma else acc

    return m


LIBRARY_NAMES = (
    "eqT10",
    "Y",
    "Meps",
    "Heps",
    "meps_ell",
    "meps_s",
    "M_ell",
    "R_ell",
    "Rfrac",
    "M",
    "imaginary_power",
    "shifted_neg_power",
)


def multiplier_library(name: str, params: JacobiParams | None = None, **kw) -> MultiplierSpec:
    """Concrete multipliers by name.

    ``eqT10`` (k): ``phi(x) x^k / prod_{j<k}(x - lambda_j)``, so that
    ``m(L) R^{k,*} R^k f = f - sum_{n<k} c_n phi_n``.
    ``Y`` (eps, r): ``(1 - e^{-eps t})^r``.
    ``Meps`` (eps, r, gamma): ``(1 - e^{-eps t})^r / (eps t)^{gamma/2}``.
    ``Heps`` (eps, r, gamma): ``int_{eps t}^inf (1 - e^{-u})^r u^{-1-gamma} du``.
    ``meps_ell`` (signs, gamma): ``sum_j s_j 2^{j gamma} a(t/2^{j-1}) / (t+1)^gamma``.
    ``meps_s`` (signs, s): ``sum_{j = s mod 4, j > 0} s_j b(t/2^{j-1})``.
    ``M_ell`` (ell, gamma): ``meps_ell`` with all signs +1.
    ``R_ell`` (ell, gamma): ``phi / M_ell`` with ``phi`` the step from
    ``lambda_0/2`` to ``lambda_0``.
    ``Rfrac`` (gamma): ``(t/(t+1))^gamma``.
    ``M`` (gamma): ``((t+1)/t)^gamma phi(t)``.
    ``imaginary_power`` (gamma, a=0): ``t^{i gamma}``.
    ``shifted_neg_power`` (gamma, a): ``(z + a)^{-gamma}`` on the shifted
    spectrum; ``a`` defaults to ``lambda_0/2``.
    Bump-based entries accept ``bump=`` (a :class:`BumpFunction`).
    """
    bump = kw.pop("bump", None) or build_bump()

    def need(*keys):
        missing = [k for k in keys if k not in kw]
        if missing:
            raise ValueError(f"multiplier {name!r} needs parameters {missing}")
        return [kw[k] for k in keys]

    if name == "eqT10":
        (k,) = need("k")
        if params is None:
            raise ValueError("eqT10 needs Jacobi parameters")
        return MultiplierSpec(_inverse_gram(params, int(k)), 0.0, name, {"k": int(k)})
    if name == "Y":
        eps, r = need("eps", "r")
        return MultiplierSpec(lambda t: (-np.expm1(-eps * t)) ** r, 0.0, name, dict(eps=eps, r=r))
    if name == "Meps":
        eps, r, gamma = need("eps", "r", "gamma")
        return MultiplierSpec(
            lambda t: (-np.expm1(-eps * t)) ** r / (eps * t) ** (gamma / 2.0), 0.0, name, dict(eps=eps, r=r, gamma=gamma)
        )
    if name == "Heps":
        eps, r, gamma = need("eps", "r", "gamma")
        return MultiplierSpec(lambda t: h_integral(t, gamma, r, eps), 0.0, name, dict(eps=eps, r=r, gamma=gamma))
    if name == "meps_ell":
        signs, gamma = need("signs", "gamma")
        return MultiplierSpec(_dyadic_sum(signs, gamma, bump, bump), 0.0, name, dict(signs=tuple(signs), gamma=gamma))
    if name == "meps_s":
        signs, s = need("signs", "s")
        w = [sg if (j % 4 == s and j > 0) else 0.0 for j, sg in enumerate(signs)]
        return MultiplierSpec(_dyadic_sum(w, 0.0, bump, bump.b), 0.0, name, dict(signs=tuple(signs), s=s))
    if name in ("M_ell", "R_ell"):
        ell, gamma = need("ell", "gamma")
        m_ell = _dyadic_sum(np.ones(int(ell) + 1), gamma, bump, bump)
        if name == "M_ell":
            return MultiplierSpec(m_ell, 0.0, name, dict(ell=ell, gamma=gamma))
        if params is None:
            raise ValueError("R_ell needs Jacobi parameters")
        step = _lemma_step(params)

        def r_ell(t):
            c = step(t)
            out = np.zeros_like(t)
            on = c > 0
            out[on] = c[on] / m_ell(t[on])
            return out

        return MultiplierSpec(r_ell, 0.0, name, dict(ell=ell, gamma=gamma))
    if name == "Rfrac":
        (gamma,) = need("gamma")
        return MultiplierSpec(lambda t: (t / (t + 1.0)) ** gamma, 0.0, name, dict(gamma=gamma))
    if name == "M":
        (gamma,) = need("gamma")
        if params is None:
            raise ValueError("M needs Jacobi parameters")
        step = _lemma_step(params)

        def m_big(t):
            c = step(t)
            out = np.zeros_like(t)
            on = c > 0
            out[on] = c[on] * ((t[on] + 1.0) / t[on]) ** gamma
            return out

        return MultiplierSpec(m_big, 0.0, name, dict(gamma=gamma))
    if name == "imaginary_power":
        (gamma,) = need("gamma")
        a = kw.get("a", 0.0)
        return MultiplierSpec(lambda t: t ** (1j * gamma), a, name, dict(gamma=gamma))
    if name == "shifted_neg_power":
        (gamma,) = need("gamma")
        if "a" in kw:
            a = kw["a"]
        elif params is not None:
            a = 0.5 * params.lam(0)
        else:
            raise ValueError("shifted_neg_power needs a shift a or Jacobi parameters")
        return MultiplierSpec(lambda z: (z + a) ** -gamma, a, name, dict(gamma=gamma, a=a))
    raise ValueError(f"unknown multiplier {name!r}; known: {', '.join(LIBRARY_NAMES)}")


# --- Mihlin condition ---------------------------------------------------------


def _fd_weights(order: int, half_width: int) -> np.ndarray:
    """Central finite-difference weights for the ``order``-th derivative (unit step)."""
    offs = np.arange(-half_width, half_width + 1, dtype=float)
    n = offs.size
    V = np.vander(offs, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


def _euler_coeffs(ell: int) -> np.ndarray:
    """Coefficients of ``x^ell d^ell/dx^ell`` as a polynomial in ``D = x d/dx``.

    ``x^ell d^ell/dx^ell = D (D - 1) ... (D - ell + 1)`` (signed Stirling numbers).
    """
    poly = np.array([1.0])
    for i in range(ell):
        poly = np.convolve(poly, [-float(i), 1.0])
    return poly  # poly[j] multiplies D^j


def mihlin_check(m: MultiplierSpec, ell_max: int = 4, x_range=(1e-4, 1e6), h: float = 1e-2, half_width: int = 6) -> dict:
    """Empirical ``sup_x |x^ell d^ell/dx^ell m(x)|`` for ``ell = 0..ell_max``.

    Derivatives in ``x`` become derivatives in ``y = log x``; those are taken
    by central differences of order ``2 * half_width`` on a uniform ``y`` grid.
    """
    y = np.arange(math.log(x_range[0]) - half_width * h, math.log(x_range[1]) + (half_width + 0.5) * h, h)
    g = np.asarray(m(np.exp(y)))
    inner = slice(half_width, y.size - half_width)
    out = {0: float(np.max(np.abs(g[inner])))}
    derivs = [g[inner]]
    for j in range(1, ell_max + 1):
        w = _fd_weights(j, half_width) / h**j
        derivs.append(np.convolve(g, w[::-1], mode="valid"))
    for ell in range(1, ell_max + 1):
        c = _euler_coeffs(ell)
        val = sum(c[j] * derivs[j] for j in range(1, ell + 1))
        out[ell] = float(np.max(np.abs(val)))
    return out
