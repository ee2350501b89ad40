# %% [markdown]
# Littlewood-Paley square functions and dyadic blocks.

# %%
import numpy as np
from scipy.special import gamma as Gamma

from jacobispec.jacobi import JacobiParams, SpectralFunction, build_quadrature
from jacobispec.littlewood_paley import dyadic_window, g_fractional, g_function, min_j_max, tl_quadratic
from jacobispec.multipliers import neg_power
from jacobispec.smooth import build_bump

P = JacobiParams(0.0, 0.0)
quad = build_quadrature(2048)
rng = np.random.default_rng(3)
f = SpectralFunction(P, rng.standard_normal(30) * (1 + P.lam(np.arange(30))) ** -1)

# %%
# ||g^gamma f||_2^2 = Gamma(2 gamma) / 2^{2 gamma} ||f||_2^2
for gam in (0.5, 1.0, 1.5):
    r = g_fractional(f, gam, quad).l2_norm() ** 2 / f.l2_norm() ** 2
    print(f"gamma={gam}: ratio {r:.10f}  expected {Gamma(2 * gam) / 2 ** (2 * gam):.10f}")

# %%
# the fractional square function of f equals the integer one of L^{-gamma/2} f
a = g_fractional(f, 0.5, quad, method="quadrature").values
b = g_function(neg_power(f, 0.25), 0.5, 1, quad).values
print("max |g^{1/2} f - g^{1/2,1} L^{-1/4} f| =", np.abs(a - b).max())

# %%
bump = build_bump()
t = np.linspace(0.5, 1.0, 5)
print("a(t) + a(2t) on [1/2, 1]:", bump(t) + bump(2 * t))
jm = min_j_max(f)
high = f.with_coeffs(np.where(f.lam() >= 1, f.coeffs, 0.0))
tot = sum(dyadic_window(high, j, bump).padded(30) for j in range(1, jm + 1))
print(f"j_max={jm}, reconstruction error {np.abs(tot - high.padded(30)).max():.1e}")

# %%
F = tl_quadratic(f, 1.0, None, quad, bump)
print("||(sum_j |2^j Phi_j f|^2)^{1/2}||_2 =", F.l2_norm())
