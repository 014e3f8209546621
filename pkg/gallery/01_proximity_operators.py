"""
Proximity operators
===================

Every term of the restoration objective enters the solvers through its
proximity operator ``prox_{βf}(x) = argmin_u βf(u) + (u - x)²/2``. This
script evaluates the closed forms for the three likelihoods and the ℓ1
penalty and checks each against a brute-force minimisation on a grid.
"""

# %%
# Setup
# -----
import numpy as np

from proxsplit import (
    GaussianNoise,
    L1Penalty,
    MultiplicativeNoise,
    PoissonNoise,
    lambert_w0,
    prox_gaussian,
    prox_multiplicative,
    prox_penalty,
    prox_poisson,
)

grid = np.linspace(-10, 10, 2_000_001)


def brute_force(objective):
    return grid[np.argmin(objective(grid))]


# %%
# Gaussian likelihood: a weighted average of the input and the datum.
x, beta, y, s2 = 4.0, 1.0, 2.0, 3.0
closed = prox_gaussian(np.array([x]), beta, GaussianNoise(np.array([y]), s2))[0]
ref = brute_force(lambda u: beta * (u - y) ** 2 / (2 * s2) + (u - x) ** 2 / 2)
print(f"gaussian        closed {closed:.6f}  grid {ref:.6f}")

# %%
# Poisson likelihood: the positive root of a quadratic, so the result is
# always strictly positive when a photon was counted.
x, beta, y = -1.0, 2.0, 3.0
closed = prox_poisson(np.array([x]), beta, PoissonNoise(np.array([y])))[0]
with np.errstate(divide="ignore", invalid="ignore"):
    ref = brute_force(lambda u: np.where(u > 0, beta * (u - y * np.log(u)) + (u - x) ** 2 / 2, np.inf))
print(f"poisson         closed {closed:.6f}  grid {ref:.6f}")

# %%
# Multiplicative (speckle) likelihood on the log-image. The solution goes
# through the Lambert W function.
print(f"W(1) = {lambert_w0(1.0):.15f}")
x, beta, y, looks = 1.0, 0.5, 2.0, 4
closed = prox_multiplicative(np.array([x]), beta, MultiplicativeNoise(np.array([y]), looks))[0]
ref = brute_force(lambda u: beta * looks * (u + y * np.exp(-u)) + (u - x) ** 2 / 2)
print(f"multiplicative  closed {closed:.6f}  grid {ref:.6f}")

# %%
# ℓ1 penalty: soft thresholding.
v = np.array([-3.0, -0.5, 0.2, 2.5])
print("soft threshold at 1:", prox_penalty(v, 1.0, L1Penalty()))
