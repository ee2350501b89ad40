# %% [markdown]
# Eigenfunctions, heat kernels and the Poisson kernel by subordination.
#
# Run with `python demos/01_eigenfunctions_and_kernels.py`.

# %%
import numpy as np

from jacobispec.jacobi import JacobiParams, build_quadrature, eval_phi
from jacobispec.semigroups import heat_kernel, poisson_kernel_series, poisson_kernel_subordinated

P = JacobiParams(0.5, 0.0)
quad = build_quadrature(2048)

# %%
# Gram matrix of the first 30 modes; the quadrature is composite Gauss-Legendre
T = quad.phi(P, 29)
G = (T * quad.weights) @ T.T
print("max |<phi_n, phi_m> - delta_nm| =", np.abs(G - np.eye(30)).max())

# %%
# alpha = beta = -1/2 gives the cosine basis
theta = np.linspace(0.1, 3.0, 6)
cheb = JacobiParams(-0.5, -0.5)
print("phi_4 :", eval_phi(cheb, 4, theta))
print("cos 4t:", np.sqrt(2 / np.pi) * np.cos(4 * theta))

# %%
grid = (np.arange(32) + 0.5) * np.pi / 32
for t in (0.05, 0.5, 2.0):
    K = heat_kernel(P, t, grid)
    print(f"heat t={t}: terms={K.n_terms:4d}  asym={K.asymmetry():.1e}  min={K.values.min():.3e}")

# %%
# Poisson kernel two ways: the eigen-series and the heat kernel averaged in u
for t in (0.2, 1.0):
    a = poisson_kernel_series(P, t, grid).values
    b = poisson_kernel_subordinated(P, t, grid).values
    print(f"poisson t={t}: max |series - subordinated| = {np.abs(a - b).max():.2e}")
