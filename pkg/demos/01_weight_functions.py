# %% [markdown]
# # Robust weight functions
#
# Each robust loss rho has a weight w with rho'(x) = x * w(x). IRLS uses w to
# shrink the pull of samples far from a centroid. Here we tabulate the seven
# weights and check the relation numerically.

# %%
import numpy as np

from robust_fcm.core import WEIGHT_KINDS, WeightKind
from robust_fcm.weights import printed_fair_weight, rho_weight_residual, weight

xs = np.array([0.0, 0.5, 1.0, 2.0, 4.0])
print("kind            " + "".join(f"x={x:<6g}" for x in xs))
for name in WEIGHT_KINDS:
    w = weight(WeightKind(name, 1.0), xs)
    print(f"{name:<16}" + "".join(f"{v:<8.3f}" for v in w))

# %% [markdown]
# Quadrature check of rho(x) = integral_0^x s w(s) ds on [0, 5].

# %%
grid = np.linspace(0, 5, 101)
for name in WEIGHT_KINDS:
    print(f"{name:<16} residual {rho_weight_residual(WeightKind(name, 1.5), grid):.1e}")

# %% [markdown]
# The Fair weight is sometimes printed as 1 + x/beta. That form grows with x
# and does not integrate back to the Fair loss:

# %%
fair = WeightKind("Fair", 2.0)
print("corrected:", rho_weight_residual(fair, grid))
print("printed:  ", rho_weight_residual(fair, grid, weight_fn=printed_fair_weight))
