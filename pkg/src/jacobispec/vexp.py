"""Variable-exponent Lebesgue spaces on (0, pi).

Exponents, the modular and its Luxemburg norm, conjugate exponents, a
log-Hoelder diagnostic, the centred maximal operator and Muckenhoupt
constants of weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import ConvergenceError
from .jacobi import GridFunction

__all__ = [
    "ExponentFunction",
    "Weight",
    "ModularReport",
    "LogHolderReport",
    "ApReport",
    "parse_exponent",
    "modular",
    "modular_report",
    "luxemburg_norm",
    "conjugate_exponent",
    "log_holder_check",
    "maximal_operator",
    "ap_constant",
    "weighted_norm",
]

_DENSE = np.linspace(0.0, np.pi, 20001)[1:-1]


@dataclass(frozen=True, eq=False)
class ExponentFunction:
    """A variable exponent ``p(theta)`` with ``1 < p_minus <= p <= p_plus < inf``."""

    func: Callable[[np.ndarray], np.ndarray]
    kind: str = "smooth-formula"
    name: str = ""
    p_minus: float = field(default=np.nan)
    p_plus: float = field(default=np.nan)

    def __post_init__(self):
        vals = np.asarray(self.func(_DENSE), dtype=float) * np.ones_like(_DENSE)
        lo, hi = float(vals.min()), float(vals.max())
        if np.isnan(self.p_minus):
            object.__setattr__(self, "p_minus", lo)
        if np.isnan(self.p_plus):
            object.__setattr__(self, "p_plus", hi)
        if not (self.p_minus > 1.0 and np.isfinite(self.p_plus)):
            raise ValueError(f"exponent must satisfy 1 < p_- <= p_+ < inf, got [{lo}, {hi}]")
        if lo < self.p_minus - 1e-6 or hi > self.p_plus + 1e-6:
            raise ValueError("declared p_minus/p_plus inconsistent with sampled values")

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.asarray(self.func(theta), dtype=float) * np.ones_like(theta)

    @property
    def is_constant(self) -> bool:
        return self.p_minus == self.p_plus

    @classmethod
    def constant(cls, p: float) -> "ExponentFunction":
        p = float(p)
        return cls(lambda th: np.full_like(np.asarray(th, dtype=float), p), "constant", f"const:{p:g}", p, p)

    @classmethod
    def two_valued(cls, p1: float, p2: float, split: float = np.pi / 2) -> "ExponentFunction":
        p1, p2 = float(p1), float(p2)
        return cls(
            lambda th: np.where(np.asarray(th) < split, p1, p2),
            "piecewise-constant",
            f"two:{p1:g},{p2:g}",
            min(p1, p2),
            max(p1, p2),
        )


def parse_exponent(spec: str) -> ExponentFunction:
    """Build an exponent from a preset string.

    ``const:P``, ``two:P1,P2`` (jump at pi/2), ``sin`` (2 + sin theta),
    ``linear`` (2.5 + theta/pi), ``log`` (2 + 1/log(e + 1/theta)).
    """
    name, _, arg = spec.strip().partition(":")
    try:
        if name == "const":
            return ExponentFunction.constant(float(arg))
        if name == "two":
            p1, p2 = (float(x) for x in arg.split(","))
            return ExponentFunction.two_valued(p1, p2)
    except ValueError as exc:
        raise ValueError(f"bad exponent spec {spec!r}: {exc}") from None
    if arg:
        raise ValueError(f"exponent preset {name!r} takes no arguments")
    if name == "sin":
        return ExponentFunction(lambda th: 2.0 + np.sin(th), "smooth-formula", "sin", 2.0, 3.0)
    if name == "linear":
        return ExponentFunction(lambda th: 2.5 + np.asarray(th) / np.pi, "smooth-formula", "linear", 2.5, 3.5)
    if name == "log":
        return ExponentFunction(
            lambda th: 2.0 + 1.0 / np.log(np.e + 1.0 / np.asarray(th)), "smooth-formula", "log"
        )
    raise ValueError(
        f"unknown exponent preset {spec!r}; expected const:P, two:P1,P2, sin, linear or log"
    )


@dataclass(frozen=True)
class ModularReport:
    lam: float
    modular_value: float


def _as_grid_values(f):
    return np.abs(f.values) if isinstance(f, GridFunction) else np.abs(np.asarray(f))


def modular(f: GridFunction, p: ExponentFunction, lam: float) -> float:
    """Quadrature value of ``int (|f|/lam)^{p(theta)} dtheta``."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    pv = p(f.quad.nodes)
    return float(f.quad.weights @ ((np.abs(f.values) / lam) ** pv))


def modular_report(f: GridFunction, p: ExponentFunction, lam: float) -> ModularReport:
    return ModularReport(float(lam), modular(f, p, lam))


def luxemburg_norm(f: GridFunction, p: ExponentFunction, max_iter: int = 200) -> float:
    """Luxemburg norm by bisection (in log lambda) on the decreasing modular."""
    absf = np.abs(f.values)
    sup = float(absf.max(initial=0.0))
    if sup == 0.0:
        return 0.0
    pv = p(f.quad.nodes)
    w = f.quad.weights

    def rho(log_lam):
        return w @ ((absf / np.exp(log_lam)) ** pv)

    lo = np.log(sup * min(1.0, np.pi ** (-1.0 / p.p_minus)) / 10.0)
    hi = np.log(sup * max(1.0, np.pi ** (1.0 / p.p_minus)) * 10.0)
    for _ in range(60):
        if rho(lo) > 1.0:
            break
        lo -= np.log(10.0)
    else:
        raise ConvergenceError("could not bracket the Luxemburg norm from below")
    for _ in range(60):
        if rho(hi) <= 1.0:
            break
        hi += np.log(10.0)
    else:
        raise ConvergenceError("could not bracket the Luxemburg norm from above")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if rho(mid) > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            return float(np.exp(hi))
    raise ConvergenceError(f"Luxemburg bisection did not converge in {max_iter} iterations")


def conjugate_exponent(p: ExponentFunction) -> ExponentFunction:
    """Pointwise conjugate ``p' = p/(p-1)``."""
    return ExponentFunction(
        lambda th: (lambda v: v / (v - 1.0))(p(th)),
        p.kind,
        f"conj({p.name})",
        p.p_plus / (p.p_plus - 1.0),
        p.p_minus / (p.p_minus - 1.0),
    )


@dataclass(frozen=True)
class LogHolderReport:
    """Outcome of the log-Hoelder sweep.

    ``constant`` is the empirical sup of ``|p(x)-p(y)| (-log|x-y|)`` over the
    sampled and localised pairs; ``history`` holds ``(d, C(d))`` from the
    localisation toward the worst point.
    """

    constant: float
    finite: bool
    history: tuple

    @property
    def violation(self) -> bool:
        return not self.finite


def _localise(p, x, y, d_min=1e-14):
    """Bisect toward the larger variation of ``p`` on ``[x, y]``."""
    hist = []
    a, b = min(x, y), max(x, y)
    pa, pb = p(np.array([a]))[0], p(np.array([b]))[0]
    while b - a > d_min:
        d = b - a
        hist.append((d, abs(pb - pa) * -np.log(d) if d < 1 else 0.0))
        m = 0.5 * (a + b)
        pm = p(np.array([m]))[0]
        if abs(pm - pa) >= abs(pb - pm):
            b, pb = m, pm
        else:
            a, pa = m, pm
    return hist


def log_holder_check(p: ExponentFunction, samples: int = 1000, seed: int = 0, ratio_limit: float = 1.5) -> LogHolderReport:
    """Empirical log-Hoelder constant of ``p`` on (0, pi).

    Random pairs with ``|x - y| <= 1/2`` give a sup estimate; the pair of
    largest variation (and a pair pinned near 0) is then bisected down to
    ``|x - y| ~ 1e-14``.  Growth of the constant by more than
    ``ratio_limit`` between ``d = 1e-4`` and the finest scale is reported as a
    violation (a jump makes it grow like ``-log d``).
    """
    if samples < 1000:
        raise ValueError("log_holder_check needs at least 1000 pairs")
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, np.pi, samples)
    d = 0.5 * rng.random(samples) ** 3
    y = np.clip(x + rng.choice([-1.0, 1.0], samples) * d, 1e-300, np.pi)
    dist = np.abs(x - y)
    ok = dist > 0
    x, y, dist = x[ok], y[ok], dist[ok]
    var = np.abs(p(x) - p(y))
    if np.all(var == 0.0):
        return LogHolderReport(0.0, True, ())
    c_pairs = float(np.max(var * -np.log(dist)))
    starts = [(x[np.argmax(var)], y[np.argmax(var)]), (1e-12, 0.5), (np.pi - 0.5, np.pi - 1e-12)]
    best_hist, worst_growth, c_loc = (), 1.0, 0.0
    for a, b in starts:
        hist = _localise(p, a, b)
        if not hist:
            continue
        ds = np.array([h[0] for h in hist])
        cs = np.array([h[1] for h in hist])
        c_loc = max(c_loc, float(cs.max()))
        ref = cs[np.argmin(np.abs(np.log(ds) - np.log(1e-4)))]
        growth = cs[-1] / ref if ref > 0 else (np.inf if cs[-1] > 0 else 1.0)
        if growth > worst_growth or not best_hist:
            worst_growth, best_hist = max(growth, worst_growth), tuple(hist)
    finite = worst_growth <= ratio_limit
    return LogHolderReport(max(c_pairs, c_loc) if finite else np.inf, finite, best_hist)


def maximal_operator(f: GridFunction, n_radii: int = 40) -> GridFunction:
    """Centred Hardy-Littlewood maximal function of ``|f|`` on the nodes.

    Averages over ``(theta_i - r, theta_i + r) cap (0, pi)`` for a geometric
    ladder of radii, with the cumulative integral of ``|f|`` interpolated
    linearly between quadrature cells.  The degenerate ball (``r -> 0``)
    contributes ``|f(theta_i)|``.
    """
    quad = f.quad
    absf = np.abs(f.values)
    edges = np.concatenate([[0.0], np.cumsum(quad.weights)])
    edges[-1] = np.pi
    cum = np.concatenate([[0.0], np.cumsum(quad.weights * absf)])
    theta = quad.nodes
    r_min = np.min(np.diff(theta)) if theta.size > 1 else np.pi
    radii = np.geomspace(r_min, np.pi, n_radii)
    a = np.clip(theta[None, :] - radii[:, None], 0.0, np.pi)
    b = np.clip(theta[None, :] + radii[:, None], 0.0, np.pi)
    avg = (np.interp(b, edges, cum) - np.interp(a, edges, cum)) / (b - a)
    return GridFunction(quad, np.maximum(avg.max(axis=0), absf))


@dataclass(frozen=True, eq=False)
class Weight:
    """A positive weight on (0, pi)."""

    func: Callable[[np.ndarray], np.ndarray]
    tag: str = "user"
    singular_points: tuple = ()

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.asarray(self.func(theta), dtype=float) * np.ones_like(theta)

    @classmethod
    def constant(cls, c: float = 1.0) -> "Weight":
        if not c > 0:
            raise ValueError("weight must be positive")
        return cls(lambda th: np.full_like(np.asarray(th, dtype=float), c), "constant")

    @classmethod
    def power(cls, a: float, theta0: float = 0.0) -> "Weight":
        """``|theta - theta0|^a``."""
        return cls(lambda th: np.abs(np.asarray(th) - theta0) ** a, f"power:{a:g}@{theta0:g}", (theta0,))

    @classmethod
    def from_grid(cls, quad, values) -> "Weight":
        values = np.asarray(values, dtype=float)
        if np.any(values <= 0):
            raise ValueError("weight must be positive on every node")
        nodes = quad.nodes
        return cls(lambda th: np.interp(th, nodes, values), "grid")


@dataclass(frozen=True)
class ApReport:
    """Empirical ``A_p`` constant with its refinement history.

    ``history`` lists ``(delta, sup)`` with intervals kept at distance
    ``>= delta`` from the endpoints; ``diverges`` flags continued growth.
    """

    constant: float
    history: tuple
    diverges: bool


def _interval_avg(func, a, b, singular):
    """Average of ``func`` over ``(a, b)``.

    Halves lying close to an endpoint of (0, pi) or a singular point are
    integrated in the log of the distance to it, so power singularities
    still resolve at distance ``1e-9``.
    """
    anchors = np.array(sorted({0.0, np.pi, *singular}))
    cuts = sorted({a, b, *[s for s in singular if a < s < b]})
    opts = dict(limit=200, epsabs=0.0, epsrel=1e-12)
    total = 0.0

    def piece(lo, hi, anchor, sign):
        near, far = abs(lo - anchor), abs(hi - anchor)
        if near > hi - lo if sign > 0 else far > hi - lo:
            return integrate.quad(func, lo, hi, **opts)[0]
        if sign < 0:
            near, far = far, near
        near = max(near, 1e-15 * max(1.0, abs(anchor)))
        g = lambda x: func(anchor + sign * np.exp(x)) * np.exp(x)
        return integrate.quad(g, np.log(near), np.log(far), **opts)[0]

    with np.errstate(all="ignore"):
        for u, v in zip(cuts[:-1], cuts[1:]):
            m = 0.5 * (u + v)
            total += piece(u, m, anchors[anchors <= u].max(), 1.0)
            total += piece(m, v, anchors[anchors >= v].min(), -1.0)
    return total / (b - a)


def ap_constant(w: Weight, p: float, intervals: int = 40, levels: int = 7) -> ApReport:
    """Sup over sampled intervals of ``<w>_B <w^{-1/(p-1)}>_B^{p-1}``.

    Intervals reach to within ``delta = 10^-2 .. 10^-(levels+1)`` of the
    endpoints; the constant of a weight outside ``A_p`` keeps growing as delta
    shrinks, which is reported through ``diverges``.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    dual = lambda th: w(th) ** (-1.0 / (p - 1.0))
    history = []
    sup = 0.0
    interior = np.linspace(0.0, np.pi, intervals // 2 + 2)[1:-1]
    for level in range(levels):
        delta = 10.0 ** -(level + 2)
        left = np.concatenate([[delta], np.geomspace(delta, np.pi / 2, intervals // 2)])
        right = np.pi - left
        cand = []
        for a in left:
            for b in (np.pi / 2, 2 * a, np.pi - delta):
                if b > a:
                    cand.append((a, b))
        for b in right:
            for a in (np.pi / 2, max(2 * b - np.pi, delta), delta):
                if b > a:
                    cand.append((a, b))
        for a, b in zip(interior[:-1], interior[1:]):
            cand.append((a, b))
        for a, b in cand:
            aw = _interval_avg(w, a, b, w.singular_points)
            ad = _interval_avg(dual, a, b, w.singular_points)
            val = aw * ad ** (p - 1.0)
            if np.isfinite(val):
                sup = max(sup, val)
            else:
                sup = np.inf
        history.append((delta, sup))
    growth = history[-1][1] / history[-2][1] if history[-2][1] > 0 else np.inf
    return ApReport(history[-1][1], tuple(history), bool(growth > 1.5 or not np.isfinite(sup)))


def weighted_norm(f: GridFunction, w: Weight, p: float) -> float:
    """``(int |f|^p w dtheta)^{1/p}`` by quadrature."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return float((f.quad.weights @ (np.abs(f.values) ** p * w(f.quad.nodes))) ** (1.0 / p))
