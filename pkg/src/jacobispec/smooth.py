"""Smooth steps and the dyadic bump used by the multipliers and blocks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["smooth_step", "ramp", "BumpFunction", "build_bump"]


def _sigma(x, q=1.0):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-(x[pos] ** -q))
    return out


def smooth_step(x, q: float = 1.0):
    """C-infinity step: 0 for ``x <= 0``, 1 for ``x >= 1``.

    ``psi(x) = s(x) / (s(x) + s(1 - x))`` with ``s(x) = exp(-x^{-q})`` for
    ``x > 0``.  ``q = 1`` is the standard choice.
    """
    x = np.asarray(x, dtype=float)
    a, b = _sigma(x, q), _sigma(1.0 - x, q)
    out = a / (a + b)
    return out if out.ndim else float(out)


def ramp(x, lo: float, hi: float, q: float = 1.0):
    """Smooth step rising from 0 at ``lo`` to 1 at ``hi``."""
    if not hi > lo:
        raise ValueError("ramp needs hi > lo")
    return smooth_step((np.asarray(x, dtype=float) - lo) / (hi - lo), q)


@dataclass(frozen=True)
class BumpFunction:
    """Dyadic bump ``a`` supported in ``[1/2, 2]`` with ``a(t) + a(2t) = 1`` on ``[1/2, 1]``.

    ``a(t) = psi(2t - 1)`` on ``[1/2, 1]`` and ``1 - psi(t - 1)`` on ``[1, 2]``.
    """

    q: float = 1.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        up = smooth_step(2.0 * t - 1.0, self.q)
        down = 1.0 - smooth_step(t - 1.0, self.q)
        out = np.where(t <= 1.0, up, down)
        out = np.where((t <= 0.5) | (t >= 2.0), 0.0, out)
        return out if out.ndim else float(out)

    def b(self, t):
        """``a(t/2) + a(t) + a(2t)``: equals 1 on ``[1/2, 2]``, supported in ``[1/4, 4]``."""
        t = np.asarray(t, dtype=float)
        return self(t / 2.0) + self(t) + self(2.0 * t)


def build_bump(variant: int = 1) -> BumpFunction:
    """The default bump (``variant=1``) or a second admissible one (``variant=2``).

    The second uses the flatter step built from ``exp(-x^{-2})``.
    """
    if variant not in (1, 2):
        raise ValueError("variant must be 1 or 2")
    return BumpFunction(q=float(variant))
