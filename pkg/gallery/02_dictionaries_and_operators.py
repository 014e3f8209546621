"""
Dictionaries and forward operators
==================================

The image is synthesised from wavelet coefficients, ``x = Φα``, then
observed through a linear operator ``H``. Both solvers rely on two facts
checked here: the dictionary is a tight frame (``ΦΦᵀ = cI``) and
``I + HHᵀ`` can be inverted cheaply.
"""

# %%
import numpy as np

from proxsplit import ConvOperator, Dictionary, MaskOperator, gaussian_psf, images, random_mask
from proxsplit.operators import solve_I_plus_HHt

x = images.cameraman((64, 64))

# %%
# Frame constants
# ---------------
# The orthonormal Haar basis has ``c = 1``. The undecimated (à trous) frame
# is redundant, with ``3·levels + 1`` coefficients per pixel.
for kind in ("orthobasis-haar", "undecimated-haar"):
    d = Dictionary(kind, x.shape, levels=3)
    err = np.linalg.norm(d.apply(d.adjoint(x)) - d.frame_constant * x) / np.linalg.norm(x)
    print(f"{kind:17s} c = {d.frame_constant:g}  coefficients = {d.n_coefs}  ||ΦΦᵀx - cx||/||x|| = {err:.1e}")

# %%
# Sparsity
# --------
# Most of the energy sits in a few coefficients, which is what the ℓ1
# penalty exploits.
alpha = Dictionary("orthobasis-haar", x.shape, 3).adjoint(x)
energy = np.sort(alpha**2)[::-1].cumsum() / np.sum(alpha**2)
print(f"5% of coefficients hold {100 * energy[len(alpha) // 20]:.1f}% of the energy")

# %%
# Operators
# ---------
# Convolution is diagonal in Fourier, masking is diagonal in space, so
# ``(I + HHᵀ)⁻¹`` is exact in both cases.
rng = np.random.default_rng(0)
for h in (ConvOperator(gaussian_psf(x.shape, 1.5)), MaskOperator(random_mask(x.shape, 0.34, 1))):
    r = rng.standard_normal(x.shape)
    s = solve_I_plus_HHt(h, r)
    resid = np.linalg.norm(s + h.apply(h.adjoint(s)) - r) / np.linalg.norm(r)
    print(f"{type(h).__name__:12s} ||H|| = {h.norm():.4f}  solve residual = {resid:.1e}")
