"""Jacobi trigonometric eigensystem on (0, pi).

The orthonormal functions are

    phi_n(theta) = sin(theta/2)**(alpha+1/2) * cos(theta/2)**(beta+1/2) * d_n * p_n(cos theta)

with ``p_n`` the classical (Szego) Jacobi polynomial and ``d_n`` chosen so that
``||phi_n||_{L^2(0, pi)} = 1``.  They diagonalise the Jacobi operator with
eigenvalues ``lambda_n = (n + (alpha+beta+1)/2)**2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Number

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from .errors import ResolutionError

__all__ = [
    "JacobiParams",
    "SpectralMode",
    "SpectralFunction",
    "Quadrature",
    "GridFunction",
    "pochhammer",
    "eigenvalue",
    "jacobi_p",
    "normalization",
    "eval_phi",
    "phi_table",
    "build_quadrature",
    "coefficients",
    "synthesize",
    "ladder_factor",
    "apply_ladder",
    "apply_D_grid",
    "apply_D_fd",
    "partial_sum",
    "RESOLUTION_FACTOR",
]

#: coefficients up to ``n_max`` need at least this many nodes per mode
RESOLUTION_FACTOR = 16
DEFAULT_POINTS_PER_PANEL = 64


@dataclass(frozen=True)
class JacobiParams:
    """Type parameters ``(alpha, beta)`` of the Jacobi system."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < -0.5:
                raise ValueError(f"{name} must satisfy {name} >= -1/2, got {value!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def fractional_ok(self) -> bool:
        """True when ``alpha + beta != -1``, i.e. ``lambda_0 > 0``."""
        return self.alpha + self.beta != -1.0

    @property
    def shift(self) -> float:
        """``(alpha + beta + 1) / 2``; ``sqrt(lambda_n) = n + shift``."""
        return (self.alpha + self.beta + 1.0) / 2.0

    def lam(self, n):
        """Eigenvalues ``lambda_n`` (vectorised over ``n``)."""
        return (np.asarray(n, dtype=float) + self.shift) ** 2

    def sqrt_lam(self, n):
        return np.asarray(n, dtype=float) + self.shift

    def raised(self, k: int = 1) -> "JacobiParams":
        """The ``(alpha + k, beta + k)`` system reached by ``k`` ladder steps."""
        return JacobiParams(self.alpha + k, self.beta + k)

    def lowered(self, k: int = 1) -> "JacobiParams":
        return JacobiParams(self.alpha - k, self.beta - k)


@dataclass(frozen=True)
class SpectralMode:
    n: int
    lam: float


def pochhammer(z, ell: int):
    """Rising factorial ``(z)_ell = z (z+1) ... (z+ell-1)``, with ``(z)_0 = 1``."""
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    for i in range(ell):
        out = out * (z + i)
    return out if out.ndim else float(out)


def eigenvalue(params: JacobiParams, n: int) -> SpectralMode:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return SpectralMode(int(n), float(params.lam(n)))


def jacobi_p(n_max: int, alpha: float, beta: float, x) -> np.ndarray:
    """Classical Jacobi polynomials ``p_0 .. p_{n_max}`` at ``x``.

    Three-term recurrence (Szego 4.5.1); returns shape ``(n_max + 1, len(x))``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((n_max + 1, x.size))
    out[0] = 1.0
    if n_max == 0:
        return out
    ab = alpha + beta
    out[1] = 0.5 * ((ab + 2.0) * x + alpha - beta)
    for n in range(2, n_max + 1):
        c2n = 2.0 * n + ab
        a_n = 2.0 * n * (n + ab) * (c2n - 2.0)
        b_n = (c2n - 1.0) * (c2n * (c2n - 2.0) * x + alpha * alpha - beta * beta)
        c_n = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * c2n
        out[n] = (b_n * out[n - 1] - c_n * out[n - 2]) / a_n
    return out


def _log_h(n, alpha, beta):
    """log of the classical squared norm of p_n against (1-x)^a (1+x)^b."""
    n = np.asarray(n, dtype=float)
    s = alpha + beta + 1.0
    common = s * np.log(2.0) + gammaln(n + alpha + 1.0) + gammaln(n + beta + 1.0) - gammaln(n + 1.0)
    # (2n + s) Gamma(n + s) -> Gamma(s + 1) at n = 0 (also covers s == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(
            n == 0,
            gammaln(s + 1.0),
            np.log(np.where(n == 0, 1.0, 2.0 * n + s)) + gammaln(np.where(n == 0, 1.0, n + s)),
        )
    return common - tail


def normalization(params: JacobiParams, n):
    """The constants ``d_n`` turning ``p_n`` into ``L^2(0, pi)``-normalised ``phi_n``."""
    log_d = 0.5 * (params.alpha + params.beta + 1.0) * np.log(2.0) - 0.5 * _log_h(n, params.alpha, params.beta)
    return np.exp(log_d)


def phi_table(params: JacobiParams, n_max: int, theta) -> np.ndarray:
    """Values ``phi_n(theta_i)`` for ``n = 0..n_max``; shape ``(n_max + 1, len(theta))``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    half = 0.5 * theta
    weight = np.sin(half) ** (params.alpha + 0.5) * np.cos(half) ** (params.beta + 0.5)
    p = jacobi_p(n_max, params.alpha, params.beta, np.cos(theta))
    d = normalization(params, np.arange(n_max + 1))
    return d[:, None] * p * weight[None, :]


def eval_phi(params: JacobiParams, n: int, theta):
    """Evaluate ``phi_n^{alpha,beta}`` at ``theta`` in (0, pi)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    arr = np.asarray(theta, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= np.pi):
        raise ValueError("theta must lie in the open interval (0, pi)")
    vals = phi_table(params, n, arr.ravel())[n]
    return vals.reshape(arr.shape) if arr.ndim else float(vals[0])


@dataclass(frozen=True, eq=False)
class Quadrature:
    """Composite Gauss-Legendre rule on (0, pi)."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int
    panels: int = 1
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def integrate(self, values) -> complex | float:
        return np.dot(self.weights, values)

    def phi(self, params: JacobiParams, n_max: int) -> np.ndarray:
        """Cached ``phi_table`` on the nodes (rows ``0..n_max``)."""
        key = (params.alpha, params.beta)
        table = self._cache.get(key)
        if table is None or table.shape[0] <= n_max:
            size = max(n_max + 1, 2 * (table.shape[0] if table is not None else 0))
            table = phi_table(params, size - 1, self.nodes)
            if self.order >= 512:
                _check_normalization(table, self, params)
            self._cache[key] = table
        return table[: n_max + 1]

    def max_modes(self) -> int:
        """Largest ``n_max`` allowed by the resolution floor."""
        return self.order // RESOLUTION_FACTOR


def _check_normalization(table, quad, params):
    n_chk = min(table.shape[0], quad.max_modes() + 1)
    norms = (table[:n_chk] ** 2) @ quad.weights
    worst = np.max(np.abs(norms - 1.0)) if n_chk else 0.0
    if worst > 1e-6:
        raise RuntimeError(
            f"closed-form normalisation disagrees with quadrature by {worst:.2e} "
            f"for (alpha, beta) = ({params.alpha}, {params.beta})"
        )


def build_quadrature(order: int = 2048, points_per_panel: int = DEFAULT_POINTS_PER_PANEL) -> Quadrature:
    """Composite Gauss-Legendre rule with ``order`` nodes on (0, pi).

    Panels have ``points_per_panel`` nodes each (a single panel when ``order`` is
    smaller); ``order`` must then be a multiple of ``points_per_panel``.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    ppp = min(points_per_panel, order)
    if order % ppp:
        raise ValueError(f"order {order} is not a multiple of {ppp} points per panel")
    panels = order // ppp
    x, w = leggauss(ppp)
    edges = np.linspace(0.0, np.pi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return Quadrature(nodes=nodes, weights=weights, order=order, panels=panels)


class SpectralFunction:
    """Finite expansion ``sum_n c_n phi_n^{alpha,beta}``.

    Trailing zero coefficients are dropped; the zero function keeps a single
    zero coefficient.
    """

    __slots__ = ("params", "coeffs")

    def __init__(self, params: JacobiParams, coeffs):
        c = np.atleast_1d(np.array(coeffs))
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if not np.iscomplexobj(c):
            c = c.astype(float)
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0
        if c.size == 0:
            c = np.zeros(1)
        self.params = params
        self.coeffs = c
        self.coeffs.setflags(write=False)

    @classmethod
    def mode(cls, params: JacobiParams, n: int, value=1.0) -> "SpectralFunction":
        c = np.zeros(n + 1, dtype=np.result_type(value, float))
        c[n] = value
        return cls(params, c)

    @classmethod
    def zero(cls, params: JacobiParams) -> "SpectralFunction":
        return cls(params, [0.0])

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient (-1 for the zero function)."""
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else -1

    def padded(self, size: int) -> np.ndarray:
        out = np.zeros(max(size, self.coeffs.size), dtype=self.coeffs.dtype)
        out[: self.coeffs.size] = self.coeffs
        return out

    def lam(self) -> np.ndarray:
        """Eigenvalues of the modes carried by ``coeffs``."""
        return self.params.lam(np.arange(self.coeffs.size))

    def with_coeffs(self, coeffs, params: JacobiParams | None = None) -> "SpectralFunction":
        return SpectralFunction(self.params if params is None else params, coeffs)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def inner(self, other: "SpectralFunction") -> complex:
        """``int f conj(g)``, by orthonormality."""
        self._check(other)
        n = min(self.coeffs.size, other.coeffs.size)
        return np.vdot(other.coeffs[:n], self.coeffs[:n])

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        table = phi_table(self.params, self.coeffs.size - 1, theta.ravel())
        return (self.coeffs @ table).reshape(theta.shape)

    def _check(self, other):
        if not isinstance(other, SpectralFunction):
            return NotImplemented
        if other.params != self.params:
            raise ValueError("spectral functions live in different Jacobi systems")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        n = max(self.coeffs.size, other.coeffs.size)
        return SpectralFunction(self.params, self.padded(n) + other.padded(n))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        n = max(self.coeffs.size, other.coeffs.size)
        return SpectralFunction(self.params, self.padded(n) - other.padded(n))

    def __neg__(self):
        return SpectralFunction(self.params, -self.coeffs)

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return SpectralFunction(self.params, scalar * self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return SpectralFunction(self.params, self.coeffs / scalar)

    def __eq__(self, other):
        if not isinstance(other, SpectralFunction):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def __repr__(self):
        return (
            f"SpectralFunction(alpha={self.params.alpha}, beta={self.params.beta}, "
            f"degree={self.degree})"
        )


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values of a function on the nodes of a quadrature."""

    quad: Quadrature
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != self.quad.nodes.shape:
            raise ValueError(
                f"expected {self.quad.nodes.size} values, got shape {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, quad: Quadrature, func) -> "GridFunction":
        return cls(quad, np.asarray(func(quad.nodes)))

    @property
    def theta(self) -> np.ndarray:
        return self.quad.nodes

    def integrate(self):
        return self.quad.integrate(self.values)

    def l2_norm(self) -> float:
        return float(np.sqrt(self.quad.integrate(np.abs(self.values) ** 2)))

    def inner(self, other: "GridFunction"):
        return self.quad.integrate(self.values * np.conj(other.values))

    def __abs__(self):
        return GridFunction(self.quad, np.abs(self.values))

    def _values_of(self, other):
        if isinstance(other, GridFunction):
            if other.quad is not self.quad and not np.array_equal(other.quad.nodes, self.quad.nodes):
                raise ValueError("grid functions sampled on different quadratures")
            return other.values
        if isinstance(other, Number):
            return other
        return None

    def __add__(self, other):
        v = self._values_of(other)
        return NotImplemented if v is None else GridFunction(self.quad, self.values + v)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._values_of(other)
        return NotImplemented if v is None else GridFunction(self.quad, self.values - v)

    def __mul__(self, other):
        v = self._values_of(other)
        return NotImplemented if v is None else GridFunction(self.quad, self.values * v)

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.quad, -self.values)


def coefficients(f: GridFunction, params: JacobiParams, n_max: int) -> SpectralFunction:
    """Project grid samples onto ``phi_0 .. phi_{n_max}`` by quadrature."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    quad = f.quad
    if quad.order < RESOLUTION_FACTOR * n_max:
        raise ResolutionError(
            f"quadrature order {quad.order} resolves modes up to {quad.max_modes()}, "
            f"{n_max} requested (need order >= {RESOLUTION_FACTOR * n_max})"
        )
    table = quad.phi(params, n_max)
    return SpectralFunction(params, table @ (quad.weights * f.values))


def synthesize(f: SpectralFunction, quad: Quadrature) -> GridFunction:
    """Pointwise sum ``sum_n c_n phi_n(theta_i)`` on the quadrature nodes."""
    table = quad.phi(f.params, f.coeffs.size - 1)
    return GridFunction(quad, f.coeffs @ table)


def ladder_factor(params: JacobiParams, l, ell: int):
    """Factor in ``DD^ell phi_l = factor * phi_{l-ell}^{alpha+ell, beta+ell}``."""
    l = np.asarray(l, dtype=float)
    prod = pochhammer(l - ell + 1.0, ell) * pochhammer(l + params.alpha + params.beta + 1.0, ell)
    return (-1.0) ** ell * np.sqrt(np.maximum(prod, 0.0))


def apply_ladder(f: SpectralFunction, ell: int) -> SpectralFunction:
    """Expansion of ``DD^ell f`` in the ``(alpha + ell, beta + ell)`` system.

    Modes with ``l < ell`` are annihilated (``phi_n = 0`` for ``n < 0``).
    """
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    if ell == 0:
        return f
    target = f.params.raised(ell)
    if f.coeffs.size <= ell:
        return SpectralFunction.zero(target)
    l = np.arange(ell, f.coeffs.size)
    return SpectralFunction(target, ladder_factor(f.params, l, ell) * f.coeffs[ell:])


def apply_D_grid(f: GridFunction, params: JacobiParams, n_max: int | None = None) -> GridFunction:
    """Grid values of ``D_{alpha,beta} f``.

    ``f`` is projected onto the span (degree ``n_max``, by default the
    resolution floor of its quadrature) and differentiated with the exact
    ladder, which sidesteps the endpoint singularities of cot and tan.
    """
    quad = f.quad
    n_max = quad.max_modes() if n_max is None else n_max
    proj = coefficients(f, params, n_max)
    return synthesize(apply_ladder(proj, 1), quad)


def apply_D_fd(func, params: JacobiParams, theta, h: float = np.pi / 1e6):
    """Centred finite-difference evaluation of ``D_{alpha,beta}`` on a callable.

    Diagnostic only; loses accuracy near the endpoints.
    """
    theta = np.asarray(theta, dtype=float)
    deriv = (func(theta + h) - func(theta - h)) / (2.0 * h)
    half = 0.5 * theta
    return (
        deriv
        - (2.0 * params.alpha + 1.0) / 4.0 / np.tan(half) * func(theta)
        + (2.0 * params.beta + 1.0) / 4.0 * np.tan(half) * func(theta)
    )


def partial_sum(f: GridFunction, params: JacobiParams, n: int) -> GridFunction:
    """``S_n f = sum_{k<=n} c_k(f) phi_k`` sampled on the grid of ``f``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return synthesize(coefficients(f, params, n), f.quad)
