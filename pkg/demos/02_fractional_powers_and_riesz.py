# %% [markdown]
# Fractional powers of L: exact spectral powers against the truncated
# integral I_eps, then Riesz transforms and their Gram composition.

# %%
import numpy as np

from jacobispec.jacobi import JacobiParams, SpectralFunction
from jacobispec.multipliers import (
    C_gamma_r,
    I_eps,
    apply_multiplier,
    multiplier_library,
    neg_power,
    pos_power,
    pos_power_extrapolated,
    riesz,
    riesz_adjoint,
)
from jacobispec.spaces import make_suite

P = JacobiParams(0.5, 0.5)
rng = np.random.default_rng(0)
f = SpectralFunction(P, rng.standard_normal(25) * (1 + P.lam(np.arange(25))) ** -1)

# %%
print("C_{1/2,1} =", C_gamma_r(0.5, 1), " 1/(2 sqrt(pi)) =", 1 / (2 * np.sqrt(np.pi)))
print("C_{1,2}   =", C_gamma_r(1.0, 2), " 1/(2 ln 2)     =", 1 / (2 * np.log(2)))

# %%
# I_eps approaches L^{1/2} like sqrt(eps lambda); extrapolating in eps removes that
exact = pos_power(f, 0.5)
for eps in (1e-4, 1e-6):
    err = (I_eps(f, 0.5, 1, eps) - exact).l2_norm() / exact.l2_norm()
    print(f"eps={eps:g}: relative error of I_eps = {err:.2e}")
err = (pos_power_extrapolated(f, 0.5, 1) - exact).l2_norm() / exact.l2_norm()
print(f"extrapolated: relative error = {err:.2e}")
print("L^{-1/2} L^{1/2} f - f:", (neg_power(exact, 0.5) - f).l2_norm())

# %%
# R^k lowers the mode index and raises (alpha, beta) by k
for k in (1, 2, 3):
    g = riesz(f, k)
    print(f"k={k}: R^k f lives in {g.params}, |R^k f| / |f| = {g.l2_norm() / f.l2_norm():.4f}")

# %%
# m(L) R^{k,*} R^k is the identity on modes n >= k
for k in (1, 2):
    m = multiplier_library("eqT10", P, k=k)
    worst = 0.0
    for _, h in make_suite(P, 20, n_random=10, single_max=0):
        lhs = apply_multiplier(riesz_adjoint(riesz(h, k), k), m)
        rhs = h.with_coeffs(np.where(np.arange(h.coeffs.size) < k, 0.0, h.coeffs))
        worst = max(worst, (lhs - rhs).l2_norm() / h.l2_norm())
    print(f"k={k}: worst residual over suite = {worst:.1e}")
