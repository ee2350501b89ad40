# %% [markdown]
# Ratio windows between the potential norm and the Sobolev, square-function
# and Triebel-Lizorkin norms, with the variable exponent p(theta) = 2 + sin(theta).
#
# No equivalence constants are known in closed form, so the harness records
# the spread r_max / r_min over seeded suites and checks it is stable.

# %%
from jacobispec.jacobi import JacobiParams
from jacobispec.spaces import make_suite, verify_theorem1, verify_theorem2, verify_theorem3
from jacobispec.vexp import log_holder_check, parse_exponent

P = JacobiParams(0.5, 0.5)
p = parse_exponent("sin")
print("log-Hoelder constant of p:", log_holder_check(p).constant)

# %%
for deg in (8, 32):
    suite = make_suite(P, deg, seed=0)
    for rep in (
        verify_theorem1(suite, 2, p),
        verify_theorem2(suite, 0.5, 1, p),
        verify_theorem3(suite, 1.0, p),
    ):
        s = rep.summary
        ids = ", ".join(f"{k}={v:.1e}" for k, v in rep.identities.items())
        print(f"deg={deg:2d} {rep.theorem}: window [{s['r_min']:.4f}, {s['r_max']:.4f}] spread {s['spread']:.3f}  ({ids})")
